from stability.evaluation import (
    aggregate_raters, ground_truth, random_baseline, read_rater_csv,
)
from stability.management.base import StabilityCommand


class Command(StabilityCommand):
    help = 'Точность случайного угадывания против эталона экспертов.'

    def add_arguments(self, parser):
        parser.add_argument('--truth', required=True, help='CSV оценок.')
        parser.add_argument('--trials', type=int, default=None)
        parser.add_argument('--seed', type=int, required=True)

    def run(self, **options):
        with open(options['truth'], encoding='utf-8', newline='') as stream:
            rows = read_rater_csv(stream, options['truth'])
        truth = ground_truth(aggregate_raters(rows))
        mean, std = random_baseline(
            truth,
            trials=self.setting(options, 'trials', 'BASELINE_TRIALS'),
            seed=options['seed'],
        )
        self.stdout.write('mean_accuracy,std_accuracy')
        self.stdout.write(f'{mean!r},{std!r}')

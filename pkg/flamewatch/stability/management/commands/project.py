from stability.evaluation import aggregate_raters, read_rater_csv
from stability.imaging import read_corpus
from stability.management.base import StabilityCommand, parse_thresholds
from stability.pipeline import load_model, project_corpus, write_projection_csv


class Command(StabilityCommand):
    help = (
        'Проецирует окна корпуса и центроиды модели на главные компоненты '
        '(данные графика кластеров).'
    )

    def add_arguments(self, parser):
        parser.add_argument('model', help='Файл модели FSPM.')
        parser.add_argument('corpus_dir', help='Каталог корпуса клипов.')
        parser.add_argument('--out', required=True, help='Файл CSV.')
        parser.add_argument(
            '--truth', default=None,
            help='CSV оценок экспертов: добавить столбец human_label.')
        parser.add_argument(
            '--thresholds', type=parse_thresholds, default=None,
            help='Пороги FLSC unstable,uncertain для столбца flsc_label.')

    def run(self, model, corpus_dir, **options):
        trained = load_model(model)
        human_labels = None
        if options['truth']:
            with open(options['truth'], encoding='utf-8',
                      newline='') as stream:
                rows = read_rater_csv(stream, options['truth'])
            human_labels = {
                video_id: verdict.label
                for video_id, verdict in aggregate_raters(rows).items()
            }
        rows = project_corpus(
            trained, read_corpus(corpus_dir),
            config=self.flsc_config(options, box=trained.box),
            human_labels=human_labels,
        )
        with open(options['out'], 'w', encoding='utf-8',
                  newline='') as stream:
            write_projection_csv(
                rows, stream, with_human=human_labels is not None)

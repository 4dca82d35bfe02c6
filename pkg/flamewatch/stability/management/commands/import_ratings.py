from django.db import transaction

from stability.evaluation import aggregate_raters, read_rater_csv
from stability.exceptions import DataError
from stability.management.base import StabilityCommand, logger
from stability.models import ExpertRating


class Command(StabilityCommand):
    help = 'Загружает оценки экспертов из CSV video_id,rater_id,score.'

    def add_arguments(self, parser):
        parser.add_argument('ratings', help='CSV оценок экспертов.')
        parser.add_argument(
            '--replace', action='store_true',
            help='Удалить ранее загруженные оценки.')

    def run(self, ratings, **options):
        with open(ratings, encoding='utf-8', newline='') as stream:
            rows = read_rater_csv(stream, ratings)
        aggregate_raters(rows)
        with transaction.atomic():
            if options['replace']:
                ExpertRating.objects.all().delete()
            else:
                existing = set(
                    ExpertRating.objects.values_list('video_id', 'rater_id'))
                clashes = sorted(
                    (row.video_id, row.rater_id) for row in rows
                    if (row.video_id, row.rater_id) in existing
                )
                if clashes:
                    raise DataError(
                        f'оценки уже загружены: {clashes[:5]}; '
                        'используйте --replace')
            ExpertRating.objects.bulk_create(
                ExpertRating(
                    video_id=row.video_id,
                    rater_id=row.rater_id,
                    score=row.score,
                )
                for row in rows
            )
        logger.info('загружено оценок: %d', len(rows))
        self.stdout.write(str(len(rows)))

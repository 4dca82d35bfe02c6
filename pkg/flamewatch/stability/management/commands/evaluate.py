from contextlib import ExitStack
from pathlib import Path

from django.core.management.base import CommandError
from django.db import transaction

from stability.evaluation import (
    aggregate_raters, compare_methods, ground_truth, read_prediction_csv,
    read_rater_csv, write_long_form_csv, write_report_csv,
)
from stability.management.base import EX_USAGE, StabilityCommand, logger
from stability.models import EvaluationRecord, ExpertRating


def parse_prediction_arg(text):
    """
    ``name=path`` или просто ``path``.

    Без имени метод называется по имени файла.
    """
    name, sep, path = text.partition('=')
    if not sep:
        return Path(text).stem, text
    return name, path


class Command(StabilityCommand):
    help = (
        'Сравнивает предсказания методов с оценками экспертов. Печатает '
        'отчёт CSV по методам.'
    )

    def add_arguments(self, parser):
        truth = parser.add_mutually_exclusive_group(required=True)
        truth.add_argument('--truth', help='CSV оценок экспертов.')
        truth.add_argument(
            '--truth-from-db', action='store_true',
            help='Взять оценки экспертов из базы данных.')
        parser.add_argument(
            '--pred', action='append', required=True,
            type=parse_prediction_arg,
            help='Предсказания метода: [имя=]файл.csv; можно повторять.')
        parser.add_argument(
            '--out', default=None, help='Файл отчёта вместо stdout.')
        parser.add_argument(
            '--long-form', default=None,
            help='Длинная таблица video_id,method,prediction_value.')
        parser.add_argument(
            '--store', action='store_true',
            help='Сохранить отчёты в базе данных.')

    def load_truth_rows(self, options):
        if options['truth_from_db']:
            return [rating.as_row() for rating in ExpertRating.objects.all()]
        with open(options['truth'], encoding='utf-8', newline='') as stream:
            return read_rater_csv(stream, options['truth'])

    def run(self, **options):
        predictions = {}
        for name, path in options['pred']:
            if name in predictions:
                raise CommandError(
                    f'метод {name} указан дважды', returncode=EX_USAGE)
            with open(path, encoding='utf-8', newline='') as stream:
                predictions[name] = read_prediction_csv(stream, path)
        verdicts = aggregate_raters(self.load_truth_rows(options))
        rows, reports = compare_methods(
            predictions,
            ground_truth(verdicts),
            human_scores={
                video_id: verdict.mean_score
                for video_id, verdict in verdicts.items()
            },
        )
        with ExitStack() as stack:
            if options['out']:
                out = stack.enter_context(
                    open(options['out'], 'w', encoding='utf-8', newline=''))
            else:
                out = self.stdout
            write_report_csv(reports, out)
        if options['long_form']:
            with open(options['long_form'], 'w', encoding='utf-8',
                      newline='') as stream:
                write_long_form_csv(rows, stream)
        if options['store']:
            with transaction.atomic():
                EvaluationRecord.objects.bulk_create(
                    EvaluationRecord.from_report(method, report)
                    for method, report in reports.items()
                )
            logger.info('сохранено отчётов: %d', len(reports))

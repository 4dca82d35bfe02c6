import csv

from stability.imaging import read_clip
from stability.management.base import StabilityCommand
from stability.pipeline import clip_label, inspect_clip, load_model

CLASSIFY_CSV_HEADER = (
    'window', 'first_frame', 'last_frame', 'cluster', 'label',
    'd_unstable', 'd_other',
)


class Command(StabilityCommand):
    help = (
        'Классифицирует окна клипа обученной моделью. Печатает CSV по '
        'окнам и итоговую строку clip.'
    )

    def add_arguments(self, parser):
        parser.add_argument('model', help='Файл модели FSPM.')
        parser.add_argument('clip_dir', help='Каталог клипа.')

    def run(self, model, clip_dir, **options):
        trained = load_model(model)
        verdicts = inspect_clip(trained, read_clip(clip_dir))
        writer = csv.writer(self.stdout, lineterminator='\n')
        writer.writerow(CLASSIFY_CSV_HEADER)
        for verdict in verdicts:
            writer.writerow((
                verdict.window_index, verdict.first_frame,
                verdict.last_frame, verdict.cluster, verdict.label.slug,
                repr(verdict.d_unstable), repr(verdict.d_other),
            ))
        label = clip_label(verdicts)
        writer.writerow(('clip', '', '', '', label.slug, '', ''))

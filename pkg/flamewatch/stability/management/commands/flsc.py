import sys

from stability.exceptions import DarkClipError
from stability.flsc import (
    deviation_series, label_from_deviations, write_deviation_csv,
)
from stability.imaging import read_clip
from stability.labels import StabilityLabel
from stability.management.base import StabilityCommand, logger


class Command(StabilityCommand):
    help = (
        'Классифицирует клип по флуктуациям яркости рамки. Печатает метку; '
        'код возврата 0: стабильно, 1: не уверен, 2: нестабильно.'
    )

    exit_code = 0

    def add_arguments(self, parser):
        parser.add_argument('clip_dir', help='Каталог клипа.')
        self.add_flsc_arguments(parser)
        parser.add_argument(
            '--csv', dest='csv_path', default=None,
            help='Записать отклонения по кадрам в CSV.')

    def run(self, clip_dir, **options):
        clip = read_clip(clip_dir)
        config = self.flsc_config(options)
        try:
            series = deviation_series(clip, config)
        except DarkClipError:
            logger.warning('рамка тёмная во всех кадрах, CSV не записан')
            label = StabilityLabel.UNSTABLE
        else:
            label = label_from_deviations(series.deviations, config)
            if options['csv_path']:
                with open(options['csv_path'], 'w', encoding='utf-8',
                          newline='') as stream:
                    write_deviation_csv(series, stream)
        self.stdout.write(label.slug)
        self.exit_code = int(StabilityLabel.STABLE) - int(label)

    def run_from_argv(self, argv):
        super().run_from_argv(argv)
        sys.exit(self.exit_code)

import sys
from contextlib import ExitStack

from stability.management.base import StabilityCommand
from stability.monitor import Monitor
from stability.pipeline import load_model


class Command(StabilityCommand):
    help = (
        'Читает сырой поток кадров FSPV1 и печатает записи NDJSON по '
        'каждому завершённому окну.'
    )

    def add_arguments(self, parser):
        parser.add_argument('model', help='Файл модели FSPM.')
        parser.add_argument(
            '--stream', default='-',
            help='Файл потока или - для стандартного ввода.')
        parser.add_argument(
            '--queue-windows', type=int, default=None,
            help='Ёмкость очереди окон между чтением и классификацией.')

    def run(self, model, **options):
        trained = load_model(model)
        with ExitStack() as stack:
            if options['stream'] == '-':
                stream = sys.stdin.buffer
            else:
                stream = stack.enter_context(open(options['stream'], 'rb'))
            monitor = Monitor(
                trained, stream, self.stdout,
                queue_windows=self.setting(
                    options, 'queue_windows', 'MONITOR_QUEUE_WINDOWS'),
            )
            monitor.run()

"""Общие части management-команд приложения stability."""
import logging

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from ..exceptions import ClipNotFoundError, StabilityError
from ..flsc import FlscConfig
from ..imaging import BoundingBox

logger = logging.getLogger('stability.commands')

EX_USAGE = 64
EX_DATAERR = 65
EX_IOERR = 74


def parse_box(text):
    return BoundingBox.parse(text)


def parse_thresholds(text):
    """Пороги ``unstable,uncertain``."""
    parts = text.split(',')
    if len(parts) != 2:
        raise ValueError(f'ожидалось два порога через запятую: {text!r}')
    return float(parts[0]), float(parts[1])


class StabilityCommand(BaseCommand):
    """
    Команда, переводящая ошибки анализа в коды возврата sysexits.

    Подклассы реализуют run() вместо handle().
    """

    def add_flsc_arguments(self, parser):
        parser.add_argument(
            '--box', type=parse_box, default=None,
            help='Рамка left,bottom_offset,width,height.')
        parser.add_argument(
            '--thresholds', type=parse_thresholds, default=None,
            help='Пороги FLSC unstable,uncertain, например 0.25,0.15.')

    def flsc_config(self, options, box=None):
        unstable, uncertain = options.get('thresholds') or (None, None)
        return FlscConfig.from_settings(
            box=options.get('box') or box,
            unstable_threshold=unstable,
            uncertain_threshold=uncertain,
        )

    def run(self, *args, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            self.run(*args, **options)
        except ClipNotFoundError as exc:
            raise CommandError(str(exc), returncode=EX_USAGE) from exc
        except FileNotFoundError as exc:
            raise CommandError(
                f'файл не найден: {exc.filename}', returncode=EX_USAGE,
            ) from exc
        except ValidationError as exc:
            raise CommandError(
                '; '.join(exc.messages), returncode=EX_DATAERR) from exc
        except StabilityError as exc:
            raise CommandError(str(exc), returncode=EX_DATAERR) from exc
        except OSError as exc:
            raise CommandError(str(exc), returncode=EX_IOERR) from exc

    def setting(self, options, name, setting):
        value = options.get(name)
        return getattr(settings, setting) if value is None else value

import csv
import json
from pathlib import Path

from django.core.exceptions import ValidationError

from stability.evaluation import RATER_CSV_HEADER
from stability.imaging import BoundingBox, write_clip
from stability.management.base import StabilityCommand, logger
from stability.synthgen import Scenario, generate_clip, synthetic_corpus

GENERATOR_RATER = 'generator'
CORPUS_FIELDS = (
    'n_stable', 'n_unstable', 'seed', 'box', 'width', 'height', 'duration',
    'window_len', 'noise_sigma', 'base_range', 'prefix',
)


class Command(StabilityCommand):
    help = (
        'Строит синтетические клипы по JSON: объект сценария даёт один '
        'клип, {"clips": [...]} даёт набор клипов, {"corpus": {...}} даёт '
        'корпус стабильных клипов и клипов с отрывами пламени с файлом '
        'raters.csv.'
    )

    def add_arguments(self, parser):
        parser.add_argument('scenario', help='Файл JSON.')
        parser.add_argument('--out', required=True, help='Каталог вывода.')

    def run(self, scenario, **options):
        try:
            data = json.loads(Path(scenario).read_text(encoding='utf-8'))
        except json.JSONDecodeError as exc:
            raise ValidationError(f'{scenario}: неверный JSON: {exc}')
        out = Path(options['out'])
        if isinstance(data, dict) and 'corpus' in data:
            self.write_corpus(data['corpus'], out)
        elif isinstance(data, dict) and 'clips' in data:
            self.write_clips(data['clips'], out)
        else:
            write_clip(generate_clip(Scenario.from_dict(data)), out)
            self.stdout.write(str(out))

    def write_clips(self, items, out):
        if not isinstance(items, list):
            raise ValidationError('"clips" должен быть списком сценариев')
        named = []
        for number, item in enumerate(items):
            if not isinstance(item, dict):
                raise ValidationError(f'сценарий {number} не объект JSON')
            item = dict(item)
            name = str(item.pop('name', f'clip_{number:03d}'))
            named.append((name, Scenario.from_dict(item)))
        for name, parsed in named:
            write_clip(generate_clip(parsed), out / name)
            self.stdout.write(str(out / name))

    def write_corpus(self, params, out):
        if not isinstance(params, dict):
            raise ValidationError('"corpus" должен быть объектом')
        unknown = sorted(set(params) - set(CORPUS_FIELDS))
        if unknown:
            raise ValidationError(f'неизвестные поля корпуса: {unknown}')
        params = dict(params)
        try:
            params['box'] = BoundingBox(*params['box'])
            entries = synthetic_corpus(**params)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f'неверные параметры корпуса: {exc}')
        out.mkdir(parents=True, exist_ok=True)
        with open(out / 'raters.csv', 'w', encoding='utf-8',
                  newline='') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(RATER_CSV_HEADER)
            for entry in entries:
                write_clip(entry.clip(), out / entry.clip_id)
                writer.writerow(
                    (entry.clip_id, GENERATOR_RATER, int(entry.truth)))
                self.stdout.write(str(out / entry.clip_id))
        logger.info('корпус из %d клипов записан в %s', len(entries), out)

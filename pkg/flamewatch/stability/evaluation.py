"""
Сравнение классификаторов с оценками экспертов.

Положительный класс: нестабильное пламя. Ложноположительный результат
означает тревогу на стабильном клипе.
"""
import csv
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import (
    DataError, EmptyInputError, KeyMismatchError, MissingDataError,
    ParameterError,
)
from .labels import StabilityLabel

logger = logging.getLogger(__name__)

UNSTABLE_BELOW = Fraction(4, 5)
STABLE_ABOVE = Fraction(6, 5)

RATER_CSV_HEADER = ('video_id', 'rater_id', 'score')
PREDICTION_CSV_HEADER = ('video_id', 'prediction')
REPORT_CSV_HEADER = (
    'method', 'n', 'tp', 'fp', 'tn', 'fn', 'accuracy', 'fp_rate', 'fn_rate',
)
LONG_FORM_CSV_HEADER = ('video_id', 'method', 'prediction_value')
HUMAN_METHOD = 'human'


class RaterRow(NamedTuple):
    video_id: str
    rater_id: str
    score: int


class RaterVerdict(NamedTuple):
    mean_score: float
    label: StabilityLabel


class LongFormRow(NamedTuple):
    video_id: str
    method: str
    prediction_value: float


def _ratio(numerator, denominator):
    if denominator == 0:
        return None
    return numerator / denominator


@dataclass(frozen=True)
class EvaluationReport:
    """
    Матрица ошибок бинарного классификатора.

    :Поля:
    - tp, fp, tn, fn (int): счётчики, положительный класс: нестабильно.
    """
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def matches(self):
        return self.tp + self.tn

    @property
    def accuracy(self):
        return _ratio(self.matches, self.n)

    @property
    def fp_rate(self):
        return _ratio(self.fp, self.fp + self.tn)

    @property
    def fn_rate(self):
        return _ratio(self.fn, self.fn + self.tp)

    def __str__(self):
        return f'{self.matches} из {self.n}'


def _ternary(mean):
    if mean > STABLE_ABOVE:
        return StabilityLabel.STABLE
    if mean < UNSTABLE_BELOW:
        return StabilityLabel.UNSTABLE
    return StabilityLabel.UNCERTAIN


def aggregate_raters(rows, video_ids=None):
    """
    Средняя оценка экспертов по каждому видео.

    Границы 0.8 и 1.2 сравниваются точно и относятся к неуверенной оценке.

    :Аргументы:
    - rows: итерируемое RaterRow.
    - video_ids: видео, для которых оценки обязательны.

    :Возвращает:
    - словарь video_id → RaterVerdict.
    """
    scores = defaultdict(dict)
    for row in rows:
        if row.score not in (0, 1, 2):
            raise DataError(
                f'оценка {row.score!r} эксперта {row.rater_id} для видео '
                f'{row.video_id} вне {{0, 1, 2}}'
            )
        if row.rater_id in scores[row.video_id]:
            raise DataError(
                f'эксперт {row.rater_id} оценил видео {row.video_id} '
                'дважды'
            )
        scores[row.video_id][row.rater_id] = int(row.score)
    if video_ids is not None:
        missing = sorted(set(video_ids) - set(scores))
        if missing:
            raise MissingDataError(f'нет оценок для видео: {missing}')
    result = {}
    for video_id in sorted(scores):
        values = list(scores[video_id].values())
        mean = Fraction(sum(values), len(values))
        result[video_id] = RaterVerdict(float(mean), _ternary(mean))
    return result


def binarize(score):
    """Стабильно, если оценка строго больше 1.2; иначе нестабильно."""
    try:
        exact = Fraction(score)
    except (TypeError, ValueError) as exc:
        raise DataError(f'оценка {score!r} не является числом') from exc
    if not 0 <= exact <= 2:
        raise DataError(f'оценка {score!r} вне диапазона [0, 2]')
    if exact > STABLE_ABOVE:
        return StabilityLabel.STABLE
    return StabilityLabel.UNSTABLE


def _as_binary(value):
    if isinstance(value, StabilityLabel):
        return value.binary()
    return binarize(value)


def ground_truth(verdicts):
    """Бинарный эталон из средних оценок экспертов."""
    return {
        video_id: binarize(verdict.mean_score)
        for video_id, verdict in verdicts.items()
    }


def _check_keys(predictions, truth):
    missing = set(truth) - set(predictions)
    extra = set(predictions) - set(truth)
    if missing or extra:
        raise KeyMismatchError(missing, extra)


def confusion(predictions, truth):
    """
    Матрица ошибок.

    :Аргументы:
    - predictions: video_id → метка или оценка в [0, 2].
    - truth: video_id → метка или оценка в [0, 2].

    Неуверенная метка считается нестабильной.
    """
    _check_keys(predictions, truth)
    counts = {'tp': 0, 'fp': 0, 'tn': 0, 'fn': 0}
    for video_id, actual in truth.items():
        predicted_unstable = (
            _as_binary(predictions[video_id]) == StabilityLabel.UNSTABLE)
        actually_unstable = _as_binary(actual) == StabilityLabel.UNSTABLE
        if predicted_unstable and actually_unstable:
            counts['tp'] += 1
        elif predicted_unstable:
            counts['fp'] += 1
        elif actually_unstable:
            counts['fn'] += 1
        else:
            counts['tn'] += 1
    return EvaluationReport(**counts)


def baseline_accuracies(truth, trials=1000, seed=0):
    """
    Точности отдельных испытаний случайного угадывания.

    Испытание i берёт собственный поток SeedSequence(seed).spawn(trials)[i],
    поэтому его результат не зависит от общего числа испытаний.
    """
    if trials < 1:
        raise ParameterError(f'число испытаний должно быть >= 1: {trials}')
    if not truth:
        raise EmptyInputError('эталон не содержит видео')
    stable = np.array([
        _as_binary(label) == StabilityLabel.STABLE
        for _, label in sorted(truth.items())
    ])
    streams = np.random.SeedSequence(seed).spawn(trials)
    guesses = np.array([
        np.random.default_rng(stream).integers(0, 2, size=len(stable))
        for stream in streams
    ]).astype(bool)
    return (guesses == stable).mean(axis=1)


def random_baseline(truth, trials=1000, seed=0):
    """
    Точность случайного угадывания.

    В каждом испытании каждое видео получает стабильную или нестабильную
    метку с вероятностью 1/2.

    :Возвращает:
    - (средняя точность, выборочное стандартное отклонение).
    """
    accuracy = baseline_accuracies(truth, trials, seed)
    std = float(accuracy.std(ddof=1)) if trials > 1 else 0.0
    return float(accuracy.mean()), std


def _prediction_value(value):
    if isinstance(value, StabilityLabel):
        return int(value)
    return value


def compare_methods(predictions_by_method, truth, human_scores=None):
    """
    Сравнение нескольких методов с эталоном в одной длинной таблице.

    :Аргументы:
    - predictions_by_method: имя метода → (video_id → предсказание).
    - truth: video_id → эталонная метка.
    - human_scores: необязательно, video_id → средняя оценка экспертов;
      добавляется в длинную таблицу как метод ``human``.

    :Возвращает:
    - (строки LongFormRow, словарь имя метода → EvaluationReport).
    """
    rows = []
    reports = {}
    if human_scores:
        _check_keys(human_scores, truth)
        rows.extend(
            LongFormRow(video_id, HUMAN_METHOD, human_scores[video_id])
            for video_id in sorted(truth)
        )
    for method, predictions in predictions_by_method.items():
        reports[method] = confusion(predictions, truth)
        rows.extend(
            LongFormRow(
                video_id, method, _prediction_value(predictions[video_id]))
            for video_id in sorted(truth)
        )
        logger.info(
            'метод %s: совпадений %s, точность %.3f',
            method, reports[method], reports[method].accuracy or 0.0,
        )
    return rows, reports


def _csv_rows(stream, header, source):
    reader = csv.reader(stream)
    found = next(reader, None)
    if found is None or tuple(cell.strip() for cell in found) != header:
        raise DataError(
            f'{source}: ожидался заголовок {",".join(header)}, '
            f'получено {found}'
        )
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(
                f'{source}, строка {line}: ожидалось {len(header)} полей')
        yield line, [cell.strip() for cell in row]


def read_rater_csv(stream, source='raters.csv'):
    rows = []
    for line, (video_id, rater_id, score) in _csv_rows(
            stream, RATER_CSV_HEADER, source):
        try:
            value = int(score)
        except ValueError as exc:
            raise DataError(
                f'{source}, строка {line}: оценка {score!r} не целая'
            ) from exc
        rows.append(RaterRow(video_id, rater_id, value))
    return rows


def _parse_prediction(text):
    if text in ('0', '1', '2'):
        return StabilityLabel(int(text))
    try:
        value = float(text)
    except ValueError as exc:
        raise DataError(f'предсказание {text!r} не является числом') from exc
    binarize(value)
    return value


def read_prediction_csv(stream, source='predictions.csv'):
    """Предсказания: метки 0/1/2 или оценки в [0, 2]."""
    predictions = {}
    for line, (video_id, prediction) in _csv_rows(
            stream, PREDICTION_CSV_HEADER, source):
        if video_id in predictions:
            raise DataError(
                f'{source}, строка {line}: видео {video_id} повторяется')
        try:
            predictions[video_id] = _parse_prediction(prediction)
        except DataError as exc:
            raise DataError(f'{source}, строка {line}: {exc}') from exc
    return predictions


def _cell(value: Optional[float]):
    return '' if value is None else repr(value)


def write_report_csv(reports, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(REPORT_CSV_HEADER)
    for method, report in reports.items():
        writer.writerow((
            method, report.n, report.tp, report.fp, report.tn, report.fn,
            _cell(report.accuracy), _cell(report.fp_rate),
            _cell(report.fn_rate),
        ))


def write_long_form_csv(rows, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(LONG_FORM_CSV_HEADER)
    for row in rows:
        writer.writerow(row)

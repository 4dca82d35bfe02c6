from django.db import models

from .evaluation import EvaluationReport, RaterRow
from .labels import StabilityLabel


class ExpertRating(models.Model):
    """
    Оценка стабильности пламени на видео одним экспертом.

    :Поля:
    - video_id (CharField): идентификатор видео.
    - rater_id (CharField): идентификатор эксперта.
    - score (PositiveSmallIntegerField): 0: нестабильно, 1: не уверен,
      2: стабильно.
    - created_at (DateTimeField): время загрузки оценки.
    """
    video_id = models.CharField(max_length=128, verbose_name='Видео')
    rater_id = models.CharField(max_length=128, verbose_name='Эксперт')
    score = models.PositiveSmallIntegerField(
        choices=StabilityLabel.choices, verbose_name='Оценка')
    created_at = models.DateTimeField(
        auto_now_add=True, verbose_name='Добавлено')

    class Meta:
        verbose_name = 'экспертная оценка'
        verbose_name_plural = 'Экспертные оценки'
        unique_together = ('video_id', 'rater_id')
        ordering = ('video_id', 'rater_id')

    def __str__(self):
        return f'{self.video_id} / {self.rater_id}: {self.score}'

    def as_row(self):
        return RaterRow(self.video_id, self.rater_id, self.score)


class EvaluationRecord(models.Model):
    """
    Сохранённый результат сравнения метода с экспертами.

    :Поля:
    - method (CharField): название метода.
    - n, tp, fp, tn, fn (PositiveIntegerField): матрица ошибок.
    - accuracy, fp_rate, fn_rate (FloatField): доли; пусто, если знаменатель
      равен нулю.
    """
    method = models.CharField(max_length=64, verbose_name='Метод')
    created_at = models.DateTimeField(
        auto_now_add=True, verbose_name='Добавлено')
    n = models.PositiveIntegerField(verbose_name='Видео')
    tp = models.PositiveIntegerField()
    fp = models.PositiveIntegerField()
    tn = models.PositiveIntegerField()
    fn = models.PositiveIntegerField()
    accuracy = models.FloatField(
        null=True, blank=True, verbose_name='Точность')
    fp_rate = models.FloatField(
        null=True, blank=True, verbose_name='Доля ложных тревог')
    fn_rate = models.FloatField(
        null=True, blank=True, verbose_name='Доля пропусков')

    class Meta:
        verbose_name = 'результат оценки'
        verbose_name_plural = 'Результаты оценки'
        ordering = ('-created_at',)

    def __str__(self):
        return f'{self.method}: {self.tp + self.tn} из {self.n}'

    @classmethod
    def from_report(cls, method, report):
        return cls(
            method=method,
            n=report.n,
            tp=report.tp,
            fp=report.fp,
            tn=report.tn,
            fn=report.fn,
            accuracy=report.accuracy,
            fp_rate=report.fp_rate,
            fn_rate=report.fn_rate,
        )

    def as_report(self):
        return EvaluationReport(
            tp=self.tp, fp=self.fp, tn=self.tn, fn=self.fn)

from django.db import models


class StabilityLabel(models.IntegerChoices):
    """
    Метка стабильности пламени.

    Числовые коды совпадают со шкалой экспертной анкеты:
    0: нестабильно, 1: не уверен, 2: стабильно.
    """
    UNSTABLE = 0, 'нестабильно'
    UNCERTAIN = 1, 'не уверен'
    STABLE = 2, 'стабильно'

    def binary(self):
        """Бинарная метка: неуверенная считается нестабильной."""
        if self == StabilityLabel.STABLE:
            return StabilityLabel.STABLE
        return StabilityLabel.UNSTABLE

    @property
    def slug(self):
        return self.name.lower()

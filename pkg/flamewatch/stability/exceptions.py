"""Исключения приложения stability."""


class StabilityError(Exception):
    """Базовое исключение анализа стабильности пламени."""


class FrameFormatError(StabilityError):
    """
    Ошибка формата кадра или клипа на диске.

    :Атрибуты:
    - offset: смещение в байтах, на котором обнаружена ошибка (или None).
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f'{message} (байт {offset})'
        super().__init__(message)
        self.offset = offset


class ClipNotFoundError(StabilityError):
    pass


class DimensionError(StabilityError):
    pass


class EmptyInputError(StabilityError):
    pass


class DarkClipError(StabilityError):
    """Средняя яркость области клипа равна нулю."""


class InsufficientDataError(StabilityError):
    pass


class ParameterError(StabilityError):
    pass


class DataError(StabilityError):
    pass


class MissingDataError(DataError):
    pass


class KeyMismatchError(DataError):
    """
    Наборы идентификаторов видео не совпадают.

    :Атрибуты:
    - missing: идентификаторы, которых нет в предсказаниях.
    - extra: идентификаторы, которых нет в эталоне.
    """

    def __init__(self, missing, extra):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        super().__init__(
            f'наборы видео не совпадают: отсутствуют {self.missing}, '
            f'лишние {self.extra}'
        )


class StreamHeaderError(StabilityError):
    pass


class ModelFileError(StabilityError):
    """
    Ошибка чтения файла модели.

    :Атрибуты:
    - section: имя секции файла, в которой произошла ошибка.
    """

    def __init__(self, section, message):
        super().__init__(f'секция {section}: {message}')
        self.section = section

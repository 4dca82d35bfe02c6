"""
Двоичный формат файлов с секциями.

Файл: сигнатура (4 байта), версия (u32), затем секции
``тег (4 байта) | длина (u32) | данные`` и в конце CRC-32 (u32) всех
предыдущих байт. Все числа little-endian, вещественные в float64.
"""
import struct
import zlib
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .exceptions import ModelFileError

_U8 = struct.Struct('<B')
_U32 = struct.Struct('<I')
_I32 = struct.Struct('<i')
_I64 = struct.Struct('<q')
_F64 = struct.Struct('<d')


def _tag_name(tag):
    return tag.decode('ascii').strip()


class SectionPayload:
    """Накопитель данных одной секции при записи."""

    def __init__(self):
        self._chunks = []

    def _put(self, packer, value):
        self._chunks.append(packer.pack(value))

    def u8(self, value):
        self._put(_U8, value)

    def u32(self, value):
        self._put(_U32, value)

    def i32(self, value):
        self._put(_I32, value)

    def i64(self, value):
        self._put(_I64, value)

    def f64(self, value):
        self._put(_F64, value)

    def f64_array(self, array):
        self._chunks.append(np.asarray(array, dtype='<f8').tobytes())

    def text(self, value):
        encoded = value.encode('utf-8')
        self.u32(len(encoded))
        self._chunks.append(encoded)

    def getvalue(self):
        return b''.join(self._chunks)


class SectionWriter:
    """
    Собирает файл из секций.

    :Аргументы:
    - magic: сигнатура файла, 4 байта.
    - version: версия формата.
    """

    def __init__(self, magic, version):
        self._parts = [magic, _U32.pack(version)]

    @contextmanager
    def section(self, tag):
        payload = SectionPayload()
        yield payload
        data = payload.getvalue()
        self._parts.extend((tag, _U32.pack(len(data)), data))

    def getvalue(self):
        body = b''.join(self._parts)
        return body + _U32.pack(zlib.crc32(body))

    def write_to(self, path):
        Path(path).write_bytes(self.getvalue())


class SectionCursor:
    """Последовательное чтение данных одной секции."""

    def __init__(self, name, data):
        self.name = name
        self._data = data
        self._pos = 0

    def _take(self, size):
        end = self._pos + size
        if end > len(self._data):
            raise ModelFileError(self.name, 'данные секции оборваны')
        chunk = self._data[self._pos:end]
        self._pos = end
        return chunk

    def _get(self, packer):
        return packer.unpack(self._take(packer.size))[0]

    def u8(self):
        return self._get(_U8)

    def u32(self):
        return self._get(_U32)

    def i32(self):
        return self._get(_I32)

    def i64(self):
        return self._get(_I64)

    def f64(self):
        return self._get(_F64)

    def f64_array(self, shape):
        count = int(np.prod(shape, dtype=np.int64))
        raw = self._take(count * _F64.size)
        return np.frombuffer(raw, dtype='<f8').astype(np.float64).reshape(
            shape)

    def text(self):
        size = self.u32()
        try:
            return self._take(size).decode('utf-8')
        except UnicodeDecodeError as exc:
            raise ModelFileError(self.name, f'неверная строка: {exc}')

    def check_consumed(self):
        if self._pos != len(self._data):
            raise ModelFileError(
                self.name,
                f'лишние байты: {len(self._data) - self._pos}',
            )


class SectionReader:
    """
    Чтение файла, записанного SectionWriter.

    Секции разбираются по порядку; контрольная сумма проверяется в finish(),
    поэтому обрыв файла сообщает имя секции, в которой он случился.
    """

    def __init__(self, data, magic, versions):
        self._data = data
        if len(data) < len(magic) or data[:len(magic)] != magic:
            raise ModelFileError('magic', 'bad magic: неверная сигнатура')
        if len(data) < len(magic) + _U32.size:
            raise ModelFileError('header', 'заголовок оборван')
        (self.version,) = _U32.unpack_from(data, len(magic))
        if self.version not in versions:
            raise ModelFileError(
                'header',
                f'неподдерживаемая версия формата {self.version}, '
                f'ожидалась одна из {list(versions)}',
            )
        self._pos = len(magic) + _U32.size

    @classmethod
    def open(cls, path, magic, versions):
        return cls(Path(path).read_bytes(), magic, versions)

    @contextmanager
    def section(self, tag):
        name = _tag_name(tag)
        header_end = self._pos + len(tag) + _U32.size
        if header_end > len(self._data):
            raise ModelFileError(name, 'файл оборван перед секцией')
        found = self._data[self._pos:self._pos + len(tag)]
        if found != tag:
            raise ModelFileError(
                name, f'ожидался тег {tag!r}, найден {found!r}')
        (size,) = _U32.unpack_from(self._data, self._pos + len(tag))
        end = header_end + size
        if end > len(self._data):
            raise ModelFileError(name, 'файл оборван внутри секции')
        cursor = SectionCursor(name, self._data[header_end:end])
        yield cursor
        cursor.check_consumed()
        self._pos = end

    def finish(self):
        tail = self._data[self._pos:]
        if len(tail) < _U32.size:
            raise ModelFileError('checksum', 'файл оборван: нет CRC-32')
        if len(tail) > _U32.size:
            raise ModelFileError(
                'checksum', f'лишние байты после секций: {len(tail) - 4}')
        (stored,) = _U32.unpack(tail)
        actual = zlib.crc32(self._data[:self._pos])
        if stored != actual:
            raise ModelFileError(
                'checksum',
                f'checksum failure: записано {stored:#010x}, '
                f'вычислено {actual:#010x}',
            )

"""Modbus-RTU framing and the drive register encodings.

Register map (vendor documentation is not available, so these are our own):

==========  =========================================  =====================
register    meaning                                    encoding
==========  =========================================  =====================
0x0000      target shaft speed                         int16, 0.1 r/min
0x0002      acceleration limit                         uint16, 10 (r/min)/s
0x0010-11   cumulative encoder revolutions             int32 big-endian
                                                       register pair, 1/1000 rev
==========  =========================================  =====================
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

READ_HOLDING = 0x03
WRITE_SINGLE = 0x06
EXCEPTION_FLAG = 0x80

REG_SPEED = 0x0000
REG_ACCEL = 0x0002
REG_REVS = 0x0010

ILLEGAL_FUNCTION = 0x01
ILLEGAL_ADDRESS = 0x02
ILLEGAL_VALUE = 0x03

SPEED_UNIT = 0.1  # r/min per count
ACCEL_UNIT = 10.0  # (r/min)/s per count
REVS_UNIT = 1e-3  # rev per count


class ModbusError(ValueError):
    pass


class CrcMismatch(ModbusError):
    def __init__(self, msg="crc mismatch"):
        super().__init__(msg)


class TruncatedFrame(ModbusError):
    def __init__(self, msg="truncated frame"):
        super().__init__(msg)


class UnknownFunction(ModbusError):
    def __init__(self, msg="unknown function"):
        super().__init__(msg)


class MalformedPayload(ModbusError):
    def __init__(self, msg="malformed payload"):
        super().__init__(msg)


def _make_table():
    table = []
    for i in range(256):
        crc = i
        for _ in range(8):
            crc = (crc >> 1) ^ 0xA001 if crc & 1 else crc >> 1
        table.append(crc)
    return tuple(table)


_TABLE = _make_table()


def crc16_modbus(data: bytes) -> int:
    """CRC-16/MODBUS (reflected 0x8005, init 0xFFFF, no final xor)."""
    crc = 0xFFFF
    for b in data:
        crc = (crc >> 8) ^ _TABLE[(crc ^ b) & 0xFF]
    return crc


def crc_bytes(data: bytes) -> bytes:
    """The CRC as it goes on the wire, low byte first."""
    return struct.pack("<H", crc16_modbus(data))


@dataclass(frozen=True)
class ModbusFrame:
    address: int
    function: int
    payload: bytes = b""

    @property
    def is_exception(self) -> bool:
        return bool(self.function & EXCEPTION_FLAG)

    def to_bytes(self) -> bytes:
        return encode_frame(self.address, self.function, self.payload)


def _check_payload(fn: int, payload: bytes) -> None:
    n = len(payload)
    if fn & EXCEPTION_FLAG:
        if (fn & 0x7F) not in (READ_HOLDING, WRITE_SINGLE):
            raise UnknownFunction()
        if n != 1:
            raise MalformedPayload()
    elif fn == WRITE_SINGLE:
        if n != 4:
            raise MalformedPayload()
    elif fn == READ_HOLDING:
        # 4-byte request, or a response: byte count then that many bytes
        if n == 4:
            return
        if n < 3 or payload[0] != n - 1 or payload[0] % 2:
            raise MalformedPayload()
    else:
        raise UnknownFunction()


def encode_frame(address: int, function: int, payload: bytes) -> bytes:
    if not 0 <= address <= 0xFF or not 0 <= function <= 0xFF:
        raise ModbusError("address and function must be single bytes")
    _check_payload(function, payload)
    body = bytes([address, function]) + bytes(payload)
    return body + crc_bytes(body)


def decode_frame(data: bytes) -> ModbusFrame:
    """Parse and validate one RTU frame.

    Raises ``TruncatedFrame`` below the 4-byte minimum, ``CrcMismatch`` when
    the trailing CRC does not match, ``UnknownFunction`` for function codes
    outside the supported set and ``MalformedPayload`` for bad lengths.
    """
    data = bytes(data)
    if len(data) < 4:
        raise TruncatedFrame()
    if crc16_modbus(data[:-2]) != struct.unpack("<H", data[-2:])[0]:
        raise CrcMismatch()
    frame = ModbusFrame(data[0], data[1], data[2:-2])
    _check_payload(frame.function, frame.payload)
    return frame


# request/response builders ---------------------------------------------------


def write_register_request(unit: int, register: int, value: int) -> bytes:
    return encode_frame(unit, WRITE_SINGLE, struct.pack(">HH", register, value & 0xFFFF))


def read_registers_request(unit: int, start: int, count: int) -> bytes:
    return encode_frame(unit, READ_HOLDING, struct.pack(">HH", start, count))


def read_response(unit: int, values: list[int]) -> bytes:
    data = b"".join(struct.pack(">H", v & 0xFFFF) for v in values)
    return encode_frame(unit, READ_HOLDING, bytes([len(data)]) + data)


def exception_response(unit: int, function: int, code: int) -> bytes:
    return encode_frame(unit, (function | EXCEPTION_FLAG) & 0xFF, bytes([code]))


def response_registers(frame: ModbusFrame) -> list[int]:
    if frame.is_exception:
        raise ModbusError(f"exception response code {frame.payload[0]}")
    if frame.function != READ_HOLDING or len(frame.payload) == 4:
        raise ModbusError("not a read response")
    data = frame.payload[1:]
    return [v for (v,) in struct.iter_unpack(">H", data)]


# register value codecs ---------------------------------------------------------


def encode_speed(rpm: float) -> int:
    """Signed 16-bit register count for a shaft speed in r/min."""
    count = int(round(rpm / SPEED_UNIT))
    if not -0x8000 <= count <= 0x7FFF:
        raise ModbusError("speed out of register range")
    return count & 0xFFFF


def decode_speed(reg: int) -> float:
    (count,) = struct.unpack(">h", struct.pack(">H", reg))
    return count * SPEED_UNIT


def encode_accel(rpm_per_s: float) -> int:
    count = int(round(rpm_per_s / ACCEL_UNIT))
    if not 0 <= count <= 0xFFFF:
        raise ModbusError("acceleration out of register range")
    return count


def decode_accel(reg: int) -> float:
    return reg * ACCEL_UNIT


def encode_revolutions(revs: float) -> tuple[int, int]:
    """High and low registers of the signed 32-bit revolution counter."""
    count = int(round(revs / REVS_UNIT))
    if not -0x80000000 <= count <= 0x7FFFFFFF:
        raise ModbusError("revolutions out of register range")
    hi, lo = struct.unpack(">HH", struct.pack(">i", count))
    return hi, lo


def decode_revolutions(hi: int, lo: int) -> float:
    (count,) = struct.unpack(">i", struct.pack(">HH", hi, lo))
    return count * REVS_UNIT


def quantize_revolutions(revs: float) -> float:
    return decode_revolutions(*encode_revolutions(revs))


def to_hex(frame: bytes) -> str:
    return " ".join(f"{b:02X}" for b in frame)

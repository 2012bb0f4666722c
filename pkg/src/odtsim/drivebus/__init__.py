"""Modbus-RTU link to the two servo drives."""

from .emulator import DriveBus, DriveEmulator, drive_emulator_step
from .frames import (
    CrcMismatch,
    MalformedPayload,
    ModbusError,
    ModbusFrame,
    TruncatedFrame,
    UnknownFunction,
    crc16_modbus,
    crc_bytes,
    decode_frame,
    encode_frame,
    quantize_revolutions,
)

__all__ = [
    "CrcMismatch", "DriveBus", "DriveEmulator", "MalformedPayload", "ModbusError",
    "ModbusFrame", "TruncatedFrame", "UnknownFunction", "crc16_modbus", "crc_bytes",
    "decode_frame", "drive_emulator_step", "encode_frame", "quantize_revolutions",
]

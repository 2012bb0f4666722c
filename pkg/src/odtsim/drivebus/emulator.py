"""Emulated servo drives on a simulated RS485 bus."""

from __future__ import annotations

import dataclasses
import struct

from ..kinematics import RPM_TO_RAD_S, RigConfig
from ..plant import MotorState, step_motor
from .frames import (
    ILLEGAL_ADDRESS,
    ILLEGAL_FUNCTION,
    ILLEGAL_VALUE,
    READ_HOLDING,
    REG_ACCEL,
    REG_REVS,
    REG_SPEED,
    WRITE_SINGLE,
    ModbusError,
    ModbusFrame,
    decode_accel,
    decode_frame,
    decode_revolutions,
    decode_speed,
    encode_accel,
    encode_revolutions,
    encode_speed,
    exception_response,
    read_registers_request,
    read_response,
    response_registers,
    write_register_request,
)

DEFAULT_LATENCY = 0.008


def _registers(motor: MotorState) -> dict[int, int]:
    hi, lo = encode_revolutions(motor.revolutions)
    accel = motor.accel_limit / RPM_TO_RAD_S
    return {
        REG_SPEED: encode_speed(motor.commanded / RPM_TO_RAD_S),
        REG_ACCEL: encode_accel(min(accel, 655350.0)),
        REG_REVS: hi,
        REG_REVS + 1: lo,
    }


def drive_emulator_step(frame: ModbusFrame, motor: MotorState, t: float,
                        latency: float = DEFAULT_LATENCY, unit: int = 1,
                        rated_rpm: float = 3000.0):
    """Serve one request addressed to drive ``unit``.

    Returns ``(motor, response_bytes, delivery_time)``. A frame for another
    unit gets no response (``None``), as on a shared bus.
    """
    if frame.address != unit:
        return motor, None, None
    fn = frame.function
    done = t + latency
    if fn == WRITE_SINGLE:
        reg, value = struct.unpack(">HH", frame.payload)
        if reg == REG_SPEED:
            rpm = decode_speed(value)
            if abs(rpm) > rated_rpm:
                return motor, exception_response(unit, fn, ILLEGAL_VALUE), done
            motor = dataclasses.replace(motor, commanded=rpm * RPM_TO_RAD_S)
        elif reg == REG_ACCEL:
            if value == 0:
                return motor, exception_response(unit, fn, ILLEGAL_VALUE), done
            motor = dataclasses.replace(motor, accel_limit=decode_accel(value) * RPM_TO_RAD_S)
        else:
            return motor, exception_response(unit, fn, ILLEGAL_ADDRESS), done
        # a write is acknowledged by echoing the request
        return motor, frame.to_bytes(), done
    if fn == READ_HOLDING and len(frame.payload) == 4:
        start, count = struct.unpack(">HH", frame.payload)
        regs = _registers(motor)
        wanted = range(start, start + count)
        if count == 0 or count > 125 or any(r not in regs for r in wanted):
            return motor, exception_response(unit, fn, ILLEGAL_ADDRESS), done
        return motor, read_response(unit, [regs[r] for r in wanted]), done
    return motor, exception_response(unit, fn & 0x7F, ILLEGAL_FUNCTION), done


class DriveEmulator:
    """One servo drive: register interface in front of the plant motor model."""

    def __init__(self, unit: int, cfg: RigConfig, motor: MotorState | None = None,
                 latency: float = DEFAULT_LATENCY):
        self.unit = unit
        self.cfg = cfg
        self.motor = motor or MotorState()
        self.latency = latency

    def handle(self, request: bytes, t: float):
        """Process raw request bytes; return ``(delivery_time, response)`` or ``None``.

        Frames with a bad CRC or for another unit are ignored.
        """
        try:
            frame = decode_frame(request)
        except ModbusError:
            return None
        self.motor, resp, done = drive_emulator_step(
            frame, self.motor, t, self.latency, self.unit, self.cfg.motor_rated_speed)
        if resp is None:
            return None
        return done, resp

    def step(self, dt: float) -> None:
        self.motor = step_motor(self.motor, self.motor.commanded, self.cfg, dt)


class DriveBus:
    """Single RS485 segment with one drive per unit address.

    Transactions are serialized: a request waits until the previous one has
    completed. The per-transaction latency defaults to the total motor
    measurement budget divided by the number of drives, so reading every drive
    once fits inside that budget.
    """

    def __init__(self, cfg: RigConfig, units=(1, 2), budget: float = DEFAULT_LATENCY):
        per = budget / len(units)
        self.drives = {u: DriveEmulator(u, cfg, latency=per) for u in units}
        self.busy_until = 0.0
        self.log: list[tuple[float, bytes, bytes | None]] = []

    def transact(self, request: bytes, t: float):
        """Send ``request`` at time ``t``; return ``(completion_time, response)``."""
        start = max(t, self.busy_until)
        result = None
        for drive in self.drives.values():
            out = drive.handle(request, start)
            if out is not None:
                result = out
        if result is None:
            # silent bus; the master times out after one slot
            done = start + next(iter(self.drives.values())).latency
            self.busy_until = done
            self.log.append((start, request, None))
            return done, None
        self.busy_until = result[0]
        self.log.append((start, request, result[1]))
        return result

    def write_speed(self, unit: int, rpm: float, t: float) -> float:
        done, resp = self.transact(write_register_request(unit, REG_SPEED, encode_speed(rpm)), t)
        _raise_on_exception(resp)
        return done

    def write_accel(self, unit: int, rpm_per_s: float, t: float) -> float:
        done, resp = self.transact(write_register_request(unit, REG_ACCEL, encode_accel(rpm_per_s)), t)
        _raise_on_exception(resp)
        return done

    def read_revolutions(self, unit: int, t: float) -> tuple[float, float]:
        """Return ``(revolutions, completion_time)``."""
        done, resp = self.transact(read_registers_request(unit, REG_REVS, 2), t)
        if resp is None:
            raise ModbusError(f"no response from unit {unit}")
        hi, lo = response_registers(decode_frame(resp))
        return decode_revolutions(hi, lo), done

    def step(self, dt: float) -> None:
        for drive in self.drives.values():
            drive.step(dt)


def _raise_on_exception(resp: bytes | None) -> None:
    if resp is None:
        raise ModbusError("no response")
    frame = decode_frame(resp)
    if frame.is_exception:
        raise ModbusError(f"drive exception code {frame.payload[0]}")

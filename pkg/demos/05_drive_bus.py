"""
Talking to the drives
=====================

Speed commands and encoder reads travel as Modbus-RTU frames over one bus with
two drives. Each transaction takes 4 ms, so reading both counters fits the
8 ms measurement budget.
"""

from odtsim.drivebus import frames as F
from odtsim.drivebus.emulator import DriveBus
from odtsim.kinematics import RigConfig, ovf_distance_from_revs

cfg = RigConfig()
req = F.write_register_request(1, F.REG_SPEED, F.encode_speed(1000.0))
print("write 1000 rpm to unit 1:", F.to_hex(req))
print("decoded:", F.decode_frame(req))

bus = DriveBus(cfg)
t = 0.0
for unit, rpm in ((1, -1500.0), (2, -1500.0)):
    bus.write_accel(unit, 20000.0, t)
    t = bus.write_speed(unit, rpm, t)

for _ in range(1000):
    bus.step(1e-3)
    t += 1e-3

n1, t = bus.read_revolutions(1, t)
n2, t = bus.read_revolutions(2, t)
print(f"counters {n1:.3f} / {n2:.3f} rev, read complete at t={t:.3f} s")
print("surface travel:", ovf_distance_from_revs(n1, n2, cfg))
for start, request, response in bus.log[-2:]:
    print(f"  {start:.3f}s  {F.to_hex(request)}  ->  {F.to_hex(response)}")

"""Scheduling instances, schedules, text formats and the seeded generator.

Instance file format::

    m n
    p_1
    ...
    p_n

Schedule format::

    makespan V
    a_1 a_2 ... a_n
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exceptions import InstanceFormatError

MAX_PROCESSING_TIME = 2**31 - 1
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Instance:
    processing_times: tuple[int, ...]
    machine_count: int

    def __post_init__(self):
        object.__setattr__(self, "processing_times", tuple(int(p) for p in self.processing_times))
        if not self.processing_times:
            raise ValueError("an instance needs at least one job")
        if self.machine_count < 1:
            raise ValueError("machine_count must be >= 1")
        for p in self.processing_times:
            if not 1 <= p <= MAX_PROCESSING_TIME:
                raise ValueError(f"processing time {p} outside [1, 2^31-1]")

    @property
    def n(self) -> int:
        return len(self.processing_times)

    @property
    def m(self) -> int:
        return self.machine_count

    @property
    def total(self) -> int:
        return sum(self.processing_times)

    def lower_bound(self) -> int:
        """max(ceil(sum p / m), max p); no schedule beats it."""
        return max(-(-self.total // self.m), max(self.processing_times))


@dataclass(frozen=True)
class Schedule:
    assignment: tuple[int, ...]
    loads: tuple[int, ...] = field(default=())

    @classmethod
    def from_assignment(cls, instance: Instance, assignment) -> "Schedule":
        assignment = tuple(int(a) for a in assignment)
        check_assignment(instance, assignment)
        loads = [0] * instance.m
        for p, a in zip(instance.processing_times, assignment):
            loads[a] += p
        return cls(assignment, tuple(loads))

    @property
    def makespan(self) -> int:
        return max(self.loads)


def check_assignment(instance: Instance, assignment) -> None:
    if len(assignment) != instance.n:
        raise ValueError(f"assignment has {len(assignment)} entries for {instance.n} jobs")
    for a in assignment:
        if not 0 <= a < instance.m:
            raise ValueError(f"machine index {a} outside [0, {instance.m})")


def makespan(instance: Instance, schedule: Schedule) -> int:
    """Maximum machine load, recomputed from the assignment."""
    return Schedule.from_assignment(instance, schedule.assignment).makespan


# -- text formats ---------------------------------------------------------

def _int_field(token, line):
    try:
        return int(token, 10)
    except ValueError:
        raise InstanceFormatError(f"expected an integer, got {token!r}", line) from None


def parse_instance(text: str) -> Instance:
    if not text.endswith("\n"):
        raise InstanceFormatError("missing trailing newline", text.count("\n") + 1)
    lines = text[:-1].split("\n")
    header = lines[0].split(" ")
    if len(header) != 2:
        raise InstanceFormatError("header must be 'm n'", 1)
    m, n = (_int_field(tok, 1) for tok in header)
    if m < 1 or n < 1:
        raise InstanceFormatError("m and n must be positive", 1)
    body = lines[1:]
    if len(body) != n:
        raise InstanceFormatError(
            f"job-count mismatch: header says {n}, found {len(body)}", min(len(lines), n + 1) + 1
        )
    times = []
    for lineno, raw in enumerate(body, start=2):
        p = _int_field(raw.strip(), lineno)
        if p <= 0:
            raise InstanceFormatError("non-positive processing time", lineno)
        if p > MAX_PROCESSING_TIME:
            raise InstanceFormatError("processing time exceeds 2^31-1", lineno)
        times.append(p)
    return Instance(tuple(times), m)


def format_instance(instance: Instance) -> str:
    out = [f"{instance.m} {instance.n}"]
    out.extend(str(p) for p in instance.processing_times)
    return "\n".join(out) + "\n"


def format_schedule(instance: Instance, schedule: Schedule) -> str:
    return f"makespan {makespan(instance, schedule)}\n" + " ".join(map(str, schedule.assignment)) + "\n"


def parse_schedule(text: str) -> tuple[int, tuple[int, ...]]:
    """Return the claimed makespan and the assignment, unchecked."""
    lines = text.rstrip("\n").split("\n")
    if len(lines) != 2:
        raise InstanceFormatError("schedule must have exactly two lines", min(len(lines), 2) + 1)
    head = lines[0].split(" ")
    if len(head) != 2 or head[0] != "makespan":
        raise InstanceFormatError("first line must be 'makespan V'", 1)
    claimed = _int_field(head[1], 1)
    assignment = tuple(_int_field(tok, 2) for tok in lines[1].split())
    return claimed, assignment


def verify_schedule(instance: Instance, text: str) -> list[str]:
    """Diagnostics for a schedule file; an empty list means it checks out."""
    try:
        claimed, assignment = parse_schedule(text)
        schedule = Schedule.from_assignment(instance, assignment)
    except ValueError as exc:
        return [str(exc)]
    if claimed != schedule.makespan:
        return [f"makespan line says {claimed} but loads give {schedule.makespan}"]
    return []


# -- generator ------------------------------------------------------------

class XorShift64Star:
    """xorshift64* with multiplier 0x2545F4914F6CDD1D; seed 0 maps to 1."""

    MULTIPLIER = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        self.state = (seed & _MASK64) or 1

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * self.MULTIPLIER) & _MASK64

    def below(self, bound: int) -> int:
        return self.next() % bound


def generate_instance(seed: int, n: int, m: int, p_max: int) -> Instance:
    if n < 1 or m < 1 or p_max < 1:
        raise ValueError("n, m and p_max must all be >= 1")
    rng = XorShift64Star(seed)
    return Instance(tuple(1 + rng.below(p_max) for _ in range(n)), m)

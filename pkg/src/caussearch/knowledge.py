"""Background knowledge: temporal tiers plus explicit edge constraints.

Variables in later tiers cannot cause variables in earlier tiers. A tier may
additionally forbid edges among its own members. Explicit forbidden and
required ordered pairs are layered on top; any overlap between required and
forbidden constraints is a validation error rather than a precedence rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .data import Dataset
from .errors import KnowledgeError


@dataclass
class Knowledge:
    tiers: list[list[str]] = field(default_factory=list)
    forbidden_within: list[bool] = field(default_factory=list)
    forbidden: set[tuple[str, str]] = field(default_factory=set)
    required: set[tuple[str, str]] = field(default_factory=set)

    def _ensure_tier(self, tier: int) -> None:
        if tier < 0:
            raise KnowledgeError(f"tier index must be >= 0, got {tier}")
        while len(self.tiers) <= tier:
            self.tiers.append([])
            self.forbidden_within.append(False)

    def tier_of(self, name: str) -> int | None:
        for t, names in enumerate(self.tiers):
            if name in names:
                return t
        return None

    def add_to_tier(self, tier: int, name: str) -> "Knowledge":
        self._ensure_tier(tier)
        current = self.tier_of(name)
        if current is not None and current != tier:
            raise KnowledgeError(f"{name!r} is already in tier {current}")
        if current is None:
            self.tiers[tier].append(name)
        return self

    def set_tier_forbidden_within(self, tier: int, flag: bool) -> "Knowledge":
        self._ensure_tier(tier)
        self.forbidden_within[tier] = bool(flag)
        return self

    def forbid(self, frm: str, to: str) -> "Knowledge":
        self.forbidden.add((frm, to))
        return self

    def require(self, frm: str, to: str) -> "Knowledge":
        self.required.add((frm, to))
        return self

    def is_empty(self) -> bool:
        return not self.forbidden and not self.required and not any(self.tiers)

    def is_forbidden(self, frm: str, to: str) -> bool:
        """True iff an explicit pair or the tier rules forbid frm --> to.

        Required pairs are never reported forbidden here; a required pair
        that the other constraints forbid shows up in validate() instead.
        """
        if (frm, to) in self.required:
            return False
        if (frm, to) in self.forbidden:
            return True
        tf, tt = self.tier_of(frm), self.tier_of(to)
        if tf is None or tt is None:
            return False
        if tf > tt:
            return True
        if tf == tt and self.forbidden_within[tf]:
            return True
        return False

    def forbidden_both_ways(self, a: str, b: str) -> bool:
        return self.is_forbidden(a, b) and self.is_forbidden(b, a)

    def names(self) -> set[str]:
        out = set()
        for names in self.tiers:
            out.update(names)
        for a, b in self.forbidden | self.required:
            out.add(a)
            out.add(b)
        return out

    def validate(self, d: Dataset) -> list[str]:
        """Report problems instead of raising: unknown names, conflicts, cycles."""
        problems: list[str] = []
        known = set(d.names)
        for name in sorted(self.names() - known):
            problems.append(f"unknown variable {name!r} in knowledge")
        for pair in sorted(self.required & self.forbidden):
            problems.append(f"edge {pair[0]} --> {pair[1]} is both required and forbidden")
        for frm, to in sorted(self.required):
            tf, tt = self.tier_of(frm), self.tier_of(to)
            if tf is not None and tt is not None:
                if tf > tt:
                    problems.append(
                        f"required edge {frm} --> {to} runs from tier {tf} into earlier tier {tt}"
                    )
                elif tf == tt and self.forbidden_within[tf]:
                    problems.append(
                        f"required edge {frm} --> {to} lies within tier {tf} which forbids internal edges"
                    )
        cycle = self._required_cycle()
        if cycle:
            problems.append("required edges form a cycle: " + " --> ".join(cycle))
        return problems

    def _required_cycle(self) -> list[str] | None:
        adj: dict[str, list[str]] = {}
        for a, b in sorted(self.required):
            adj.setdefault(a, []).append(b)
        state: dict[str, int] = {}
        stack: list[str] = []

        def visit(v: str) -> list[str] | None:
            state[v] = 1
            stack.append(v)
            for w in adj.get(v, ()):
                if state.get(w, 0) == 1:
                    return stack[stack.index(w):] + [w]
                if state.get(w, 0) == 0:
                    found = visit(w)
                    if found:
                        return found
            state[v] = 2
            stack.pop()
            return None

        for v in sorted(adj):
            if state.get(v, 0) == 0:
                found = visit(v)
                if found:
                    return found
        return None


def validate_or_raise(k: Knowledge | None, d: Dataset) -> None:
    if k is None:
        return
    problems = k.validate(d)
    if problems:
        raise KnowledgeError("; ".join(problems))

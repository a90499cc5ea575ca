"""Optional counting of primitive graph operations.

Used by the complexity-budget tests: algorithms call :func:`bump` on every
primitive step, and a test wraps a query in :func:`counting` to assert the
total stays within a polynomial budget.  When no counter is active the cost
is a single truthiness check.
"""

from collections import Counter
from contextlib import contextmanager

_stack: list[Counter] = []


def bump(name: str, n: int = 1) -> None:
    if _stack:
        _stack[-1][name] += n


@contextmanager
def counting():
    """Collect primitive-operation counts for the enclosed block."""
    counter: Counter = Counter()
    _stack.append(counter)
    try:
        yield counter
    finally:
        _stack.pop()

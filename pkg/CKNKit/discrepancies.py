"""
Discrepancy notes: places where CKNKit deliberately departs from a published formula
Copyright (c) 2025 Arjun-M/CKNKit

Numerical routines call ``flag(code)`` on the code path that implements a
corrected formula. A report collects the flags raised while it was being
produced:

    with collect() as notes:
        data = exponent_data(params)
    report.discrepancy_notes = notes.messages()
"""

import contextvars
import logging
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Set

logger = logging.getLogger(__name__)


NOTES: Dict[str, str] = {
    "hardy-shift-sign": (
        "Hardy reduction: tau_pm(mu~) = tau_pm(mu1, mu2) - mu1/2; the published reduction "
        "line carries +mu1/2, direct substitution of u = |x|^(mu1/2) v gives the minus sign."
    ),
    "power-log-coefficient": (
        "L(r^tau (-ln r)) plain coefficient is +(2 tau + N - 2 - mu1); the published display "
        "reads -(N - 2 + mu1 + 2 tau), which does not vanish at tau_0 in the critical regime."
    ),
    "q-sharp-measure": (
        "Divergence of the source mass against d gamma = |x|^(tau_+ - mu1) dx needs "
        "theta + (p+1) tau_+ - mu1 + N <= 0; the published threshold drops mu1. Both "
        "q_sharp = (N+theta)/(-tau_+) - 1 and q_sharp_measure = (N-mu1+theta)/(-tau_+) - 1 "
        "are reported; verdicts use q_sharp_measure."
    ),
    "termination-test": (
        "Bootstrap terminates when p tau_j + theta + 2 <= tau_-, equivalent to "
        "theta + p tau_j + tau_+ - mu1 + N <= 0; the published '<= -N' test drops mu1."
    ),
    "log-fundamental-remark": (
        "For mu2 = 0 the logarithmic fundamental solution -|x|^tau_- ln|x| only arises at "
        "mu1 = N - 2 (zero discriminant); for mu1 < N - 2 the power form |x|^tau_- is used."
    ),
    "singular-limit-normalization": (
        "Singular coefficient normalized as lim u(r) r^(-tau_-(mu1, mu2)); the published "
        "proof writes |x|^(-tau_- - mu1), inconsistent with the -mu1/2 reduction shift."
    ),
    "critical-shift-admissibility": (
        "At zero discriminant every shift mu2 -> mu2 - sigma0 with sigma0 > 0 is "
        "inadmissible; the p = p_sharp branch terminates through the inadmissible-operator "
        "nonexistence result instead of re-entering the iteration."
    ),
}


_active: contextvars.ContextVar[Optional[Set[str]]] = contextvars.ContextVar("cknkit_discrepancies", default=None)


class NoteCollector:
    """Set of note codes raised inside a ``collect()`` block"""

    def __init__(self, codes: Set[str]):
        self._codes = codes

    @property
    def codes(self) -> List[str]:
        return sorted(self._codes)

    def messages(self) -> List[str]:
        return [f"{code}: {NOTES[code]}" for code in self.codes]


def flag(code: str) -> None:
    """Record that the current computation went through a corrected formula."""
    if code not in NOTES:
        raise KeyError(f"unregistered discrepancy note: {code}")
    codes = _active.get()
    if codes is not None:
        codes.add(code)
    logger.debug(f"discrepancy note raised: {code}")


@contextmanager
def collect() -> Iterator[NoteCollector]:
    """
    Collect note codes raised in this context.

    Worker threads started through ``asyncio.to_thread`` copy the context, so
    flags raised inside sweep cells land in the same set.
    """
    codes: Set[str] = set()
    token = _active.set(codes)
    try:
        yield NoteCollector(codes)
    finally:
        _active.reset(token)

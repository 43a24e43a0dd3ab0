"""Lower bounds for residual finiteness growth from short laws.

If w is a law for every group in a class C and w(g, h) != e, then every
quotient in C kills w(g, h), so detecting it needs a quotient outside C.
The laws built here are the naive ones; their lengths are far from optimal
and the known optimal asymptotics are attached as metadata only.
"""

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Callable, Dict, List, Optional

from loguru import logger
from sympy import isprime

from .engine import Ball, complexity_witness
from .error_handler import CertificateFailure, ConfigurationError
from .groups import GroupBackend
from .monitoring import monitor
from .words import FreeWord, commutator, evaluate, format_word
from .words import generator as free_generator

DEFAULT_LENGTH_CAP = 16

ALPHA = math.log(2) / (math.log(1 + math.sqrt(5)) - math.log(2))


def exponent_law(l: int) -> FreeWord:
    """x1^lcm(1..l): every element of a group of order <= l has order dividing it."""
    if l < 1:
        raise ConfigurationError(f"l must be >= 1, got {l}")
    exponent = reduce(math.lcm, range(1, l + 1), 1)
    return FreeWord((1,) * exponent, 2)


def nilpotent_law(m: int) -> FreeWord:
    """[...[[x1, x2], x3], ..., x_{m+1}], a law for nilpotency class <= m."""
    if m < 1:
        raise ConfigurationError(f"m must be >= 1, got {m}")
    rank = m + 1
    word = free_generator(1, rank)
    for i in range(2, rank + 1):
        word = commutator(word, free_generator(i, rank))
    return word


def p_power_law(p: int, m: int) -> FreeWord:
    """x1^(p^m): a law for every p-group of order <= p^m."""
    if not isprime(p):
        raise ConfigurationError(f"p must be prime, got {p}")
    if m < 0:
        raise ConfigurationError(f"m must be >= 0, got {m}")
    return FreeWord((1,) * p ** m, 2)


@dataclass(frozen=True)
class LawGenerator:
    name: str
    description: Callable[[int], str]
    build: Callable[[int], FreeWord]
    class_bound: Callable[[int], int]
    metadata: Dict[str, str] = field(default_factory=dict)


EXPONENT_LAWS = LawGenerator(
    name="exponent",
    description=lambda l: f"all finite groups of order <= {l}",
    build=exponent_law,
    class_bound=lambda l: l,
    metadata={
        "optimal_law_length": "O(n^(2/3) log(n)^(3+delta)) for groups of order <= n",
        "reproduced": "no; lcm(1..n) exponent law used instead",
    },
)

NILPOTENT_LAWS = LawGenerator(
    name="nilpotent",
    description=lambda m: f"nilpotent groups of class <= {m}",
    build=nilpotent_law,
    class_bound=lambda m: m,
    metadata={
        "optimal_law_length": f"O(m^alpha), alpha = {ALPHA:.3f}",
        "reproduced": "no; left-normed commutator of length 3*2^m - 2 used instead",
    },
)


def p_group_laws(p: int) -> LawGenerator:
    if not isprime(p):
        raise ConfigurationError(f"p must be prime, got {p}")
    return LawGenerator(
        name=f"p{p}",
        description=lambda m: f"{p}-groups of order <= {p}^{m}",
        build=lambda m: p_power_law(p, m),
        class_bound=lambda m: p ** m,
        metadata={"law": f"x1^({p}^m)"},
    )


def law_generator(name: str) -> LawGenerator:
    """Looks up ``exponent``, ``nilpotent`` or ``p<prime>`` (e.g. ``p2``)."""
    if name in ("exponent", "finite"):
        return EXPONENT_LAWS
    if name == "nilpotent":
        return NILPOTENT_LAWS
    if name.startswith("p") and name[1:].isdigit():
        return p_group_laws(int(name[1:]))
    raise ConfigurationError(f"unknown class {name!r}; expected exponent, nilpotent or p<prime>")


@dataclass
class RFCertificate:
    class_description: str
    class_bound: int
    law: FreeWord
    witness: List[Any]
    witness_lengths: List[int]
    element: Any
    length: int
    provenance: str
    metadata: Dict[str, str] = field(default_factory=dict)

    @property
    def claim(self) -> str:
        return f"F({self.length}) > {self.class_bound}"

    def to_dict(self, backend: GroupBackend) -> Dict[str, Any]:
        return {
            "class": self.class_description,
            "class_bound": self.class_bound,
            "law": format_word(self.law),
            "law_length": len(self.law),
            "witness": [backend.format(g) for g in self.witness],
            "witness_lengths": self.witness_lengths,
            "element": backend.format(self.element),
            "length": self.length,
            "provenance": self.provenance,
            "claim": self.claim,
            "metadata": self.metadata,
        }


def measure_length(backend: GroupBackend, g: Any, upper: int, cap: int = DEFAULT_LENGTH_CAP) -> Optional[int]:
    """Exact S-length of g if it is at most ``min(upper, cap)``, else None."""
    if isinstance(g, FreeWord):
        return len(g)
    the_ball = Ball(backend).grow_to(min(upper, cap))
    return the_ball.length_of(g)


@monitor("rfbounds", "rf_lower_bound")
def rf_lower_bound(
    backend: GroupBackend,
    l: int,
    generator: LawGenerator,
    budget: int = 12,
    length_cap: int = DEFAULT_LENGTH_CAP,
) -> RFCertificate:
    """A surviving value w_l(g, h) of a class law, with its S-length."""
    law = generator.build(l)
    witness = complexity_witness(backend, law, budget)
    element = evaluate(law, witness.elements, backend)
    if backend.is_identity(element):
        raise CertificateFailure(f"{format_word(law)} vanished on its own witness in {backend.name}")
    lengths = [entry.length for entry in witness.entries]
    upper = len(law) * max(lengths)
    measured = measure_length(backend, element, upper, length_cap)
    if measured is None:
        length, provenance = upper, "bound"
    else:
        if measured > upper:
            raise CertificateFailure(f"measured length {measured} exceeds |w|*max|g_i| = {upper}")
        length, provenance = measured, "exact"
    certificate = RFCertificate(
        class_description=generator.description(l),
        class_bound=generator.class_bound(l),
        law=law,
        witness=list(witness.elements),
        witness_lengths=lengths,
        element=element,
        length=length,
        provenance=provenance,
        metadata=dict(generator.metadata),
    )
    logger.info(f"RF certificate in {backend.name}: {certificate.claim} ({provenance})")
    return certificate

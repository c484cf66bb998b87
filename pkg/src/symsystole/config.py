"""Loading domain specifications from JSON documents.

See ``schemas/domain.schema.json`` for the accepted format. Every loaded
domain comes back as a :class:`SymmetricDomain`; the involution defaults to
complex conjugation.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .domains import (
    HopfMorseFunction,
    PolynomialGauge,
    ScaledDomain,
    SymmetricDomain,
    bordeaux_bottle,
    ellipsoid,
    perturbed_sphere,
    toric_domain,
    unit_ball,
    ToricProfile,
)
from .errors import DomainError
from .symplectic import LinearInvolution, complex_conjugation, make_involution_theta


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """A JSON schema shipped with the package (``"domain"`` or ``"report"``)."""
    text = resources.files("symsystole").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def spec_hash(doc: dict) -> str:
    """SHA-256 of the canonical JSON form of a domain specification."""
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def validate_spec(doc: dict) -> None:
    try:
        jsonschema.validate(doc, load_schema("domain"))
    except jsonschema.ValidationError as exc:
        raise DomainError(f"invalid domain specification: {exc.message}") from exc


def _involution(doc: dict, n: int) -> LinearInvolution:
    inv = doc.get("involution")
    if inv is None:
        return complex_conjugation(n)
    if "theta" in inv:
        theta = np.atleast_1d(np.asarray(inv["theta"], dtype=float))
        if theta.size == 1:
            theta = np.full(n, theta[0])
        if theta.size != n:
            raise DomainError(f"involution needs {n} angles, got {theta.size}")
        return make_involution_theta(theta)
    return LinearInvolution.from_matrix(np.asarray(inv["matrix"], dtype=float), label=inv.get("label", "custom"))


def load_domain(doc) -> SymmetricDomain:
    """Build a :class:`SymmetricDomain` from a specification dict, JSON string or path."""
    if isinstance(doc, str):
        doc = json.loads(doc) if doc.lstrip().startswith("{") else json.loads(open(doc).read())
    validate_spec(doc)
    kind = doc["kind"]
    if kind == "bordeaux":
        if "involution" in doc:
            raise DomainError("the Bordeaux construction fixes its own involution")
        sd = bordeaux_bottle(doc["epsilon"], doc.get("delta", 0.01), doc.get("n", 2), doc.get("neck_length", 3.0))
        domain, rho = sd.domain, sd.involution
    elif kind == "perturbed_sphere":
        f = HopfMorseFunction(doc.get("delta", doc.get("f", {}).get("delta", 0.1)))
        rho = _involution(doc, 2)
        domain = perturbed_sphere(doc["epsilon"], f, rho).domain
    else:
        if kind == "ball":
            domain = unit_ball(doc.get("n", 2))
        elif kind == "ellipsoid":
            domain = ellipsoid(doc["a"])
        elif kind == "toric":
            domain = toric_domain(ToricProfile(tuple(doc["weights"]), doc.get("p", 2.0)))
        else:
            terms = [(t["coeff"], t["powers"]) for t in doc["terms"]]
            domain = PolynomialGauge(doc["n"], terms, label=doc.get("label", "custom"))
        rho = _involution(doc, domain.n)
    if "scale" in doc and doc["scale"] != 1:
        domain = ScaledDomain(domain, doc["scale"])
    sd = SymmetricDomain(domain, rho, label=doc.get("label", domain.label))
    sd.validate()
    return sd

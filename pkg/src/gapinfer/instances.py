"""File format for promise instances.

Two on-disk shapes exist: the compiler output (network plus query node,
accept outcome, threshold, parameter) and the general promise form
(network plus h, e, q, epsilon, gap kind).  ``load_instance`` sniffs the
shape and always hands back a PromiseInstance, so downstream tools never
care which pipeline produced the file.
"""

from __future__ import annotations

import json

from .bayesnet import (
    PromiseInstance,
    network_from_json,
    network_to_json,
    validate_promise_instance,
)
from .errors import InstanceFormatError, NetworkValidationError
from .numerics import format_rational, parse_rational
from .reductions import as_promise_instance, compiled_instance_from_json


def promise_instance_to_json(inst: PromiseInstance) -> dict:
    return {
        "network": network_to_json(inst.network),
        "h": {name: inst.h[name] for name in sorted(inst.h)},
        "e": {name: inst.e[name] for name in sorted(inst.e)},
        "q": format_rational(inst.q),
        "epsilon": format_rational(inst.epsilon),
        "gap_kind": inst.gap_kind,
    }


def promise_instance_from_json(payload: dict) -> PromiseInstance:
    try:
        inst = PromiseInstance(
            network=network_from_json(payload["network"]),
            h=dict(payload["h"]),
            e=dict(payload["e"]),
            q=parse_rational(payload["q"]),
            epsilon=parse_rational(payload["epsilon"]),
            gap_kind=payload.get("gap_kind", "absolute"),
        )
    except NetworkValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed instance document: {exc}") from exc
    violations = validate_promise_instance(inst)
    if violations:
        raise InstanceFormatError("; ".join(violations))
    return inst


def instance_from_json(payload) -> PromiseInstance:
    """Accept either on-disk shape and return the general form."""
    if not isinstance(payload, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    if "query_node" in payload:
        return as_promise_instance(compiled_instance_from_json(payload))
    if "h" in payload:
        return promise_instance_from_json(payload)
    raise InstanceFormatError(
        "instance document has neither a query_node nor an h field")


def save_promise_instance(inst: PromiseInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(promise_instance_to_json(inst), handle, indent=2)
        handle.write("\n")


def load_instance(path) -> PromiseInstance:
    with open(path, encoding="utf-8") as handle:
        return instance_from_json(json.load(handle))

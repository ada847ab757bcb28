"""SpaceEx model (XML) and configuration (cfg) emission.

The automaton becomes one flat base component.  Urgent locations are
encoded with an extra clock ``urg``: flow ``urg' == 1``, invariant
``urg <= 0`` and ``urg := 0`` on every incoming transition.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Mapping, Optional

from ..expr import TRUE, Num, is_nonlinear, normalize, nonlinear_subterms, to_text
from ..ha import HybridAutomaton
from ..predicate import check_predicate, parse_predicate, to_spaceex

NAMESPACE = "http://www-verimag.imag.fr/xml-namespaces/sspaceex"
URGENCY_VAR = "urg"


def _text(e) -> str:
    return to_text(e, and_op="&", or_op="|")


def urgency_var(ha: HybridAutomaton) -> str:
    name = URGENCY_VAR
    while name in ha.variables:
        name += "_"
    return name


def spaceex_id(location_id: int) -> str:
    """SpaceEx numbers locations from 1."""
    return str(location_id + 1)


def emit_spaceex(ha: HybridAutomaton, system: str = "sys") -> tuple:
    """Return (XML text, warnings) for ``ha`` as component ``system``."""
    warnings = []
    urgent = any(loc.urgent for loc in ha.locations.values())
    urg = urgency_var(ha) if urgent else None

    def check(e, where):
        if is_nonlinear(e):
            terms = ", ".join(_text(t) for t in nonlinear_subterms(e))
            message = f"nonlinear expression in {where}: {terms}"
            if message not in warnings:
                warnings.append(message)
        return _text(e)

    root = ET.Element("sspaceex", {"xmlns": NAMESPACE, "version": "0.2", "math": "SpaceEx"})
    comp = ET.SubElement(root, "component", {"id": system})
    for v in ha.variables + ((urg,) if urg else ()):
        ET.SubElement(comp, "param", {"name": v, "type": "real", "local": "false",
                                      "d1": "1", "d2": "1", "dynamics": "any"})
    for loc in ha.locations.values():
        node = ET.SubElement(comp, "location", {"id": spaceex_id(loc.id), "name": loc.name})
        where = f"location {loc.name}"
        if loc.urgent:
            inv = f"{urg} <= 0"
            flows = [f"{urg}' == 1"] + [f"{v}' == 0" for v in ha.variables]
        else:
            inv = None if _is_true(loc.invariant) else check(loc.invariant, where)
            flows = [f"{v}' == {check(loc.flows.get(v, Num(0)), where)}" for v in ha.variables]
            if urg:
                flows.append(f"{urg}' == 0")
        if inv is not None:
            ET.SubElement(node, "invariant").text = inv
        ET.SubElement(node, "flow").text = " & ".join(flows) if flows else "true"
    for k, t in enumerate(ha.transitions):
        node = ET.SubElement(comp, "transition", {"source": spaceex_id(t.source),
                                                  "target": spaceex_id(t.target)})
        if t.label:
            ET.SubElement(node, "label").text = t.label
        where = f"transition {k}"
        if not _is_true(t.guard):
            ET.SubElement(node, "guard").text = check(t.guard, where)
        assigns = [f"{v} := {check(e, where)}" for v, e in t.assignments]
        if urg and ha.locations[t.target].urgent:
            assigns.append(f"{urg} := 0")
        if assigns:
            ET.SubElement(node, "assignment").text = " & ".join(assigns)
    ET.indent(root, space="  ")
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="iso-8859-1"?>\n' + body + "\n", warnings


def _is_true(e) -> bool:
    return normalize(e) == TRUE


def emit_cfg(ha: HybridAutomaton, forbidden=None, options: Optional[Mapping] = None,
             system: str = "sys") -> str:
    """SpaceEx configuration: system, initial states, forbidden states and
    any scenario options, which are copied through unchanged."""
    init_loc = ha.locations[ha.initial_location]
    init = f"loc({system})=={init_loc.name}"
    cond = ha.init.get(ha.initial_location)
    if cond is not None and not _is_true(cond):
        init += " & " + _text(cond)
    if any(loc.urgent for loc in ha.locations.values()):
        init += f" & {urgency_var(ha)} == 0"
    lines = [f'system = "{system}"', f'initially = "{init}"']
    if forbidden is not None:
        pred = parse_predicate(forbidden) if isinstance(forbidden, str) else forbidden
        check_predicate(pred, ha)
        lines.append(f'forbidden = "{to_spaceex(pred, system)}"')
    for key, value in (options or {}).items():
        text = str(value)
        if not (text.startswith('"') or text.replace(".", "", 1).isdigit()):
            text = f'"{text}"'
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


__all__ = ["emit_spaceex", "emit_cfg", "urgency_var", "spaceex_id", "NAMESPACE"]

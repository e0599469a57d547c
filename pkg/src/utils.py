#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Utility functions for building and rendering reports."""

import json
from fractions import Fraction
from typing import Any, Dict

from jinja2 import Template

from constants import REPORT_TEMPLATE_PATH


def format_rational(value: Fraction) -> str:
    """Render a rational as a reduced "num/den" string, e.g. Fraction(2) -> "2/1"."""
    return f"{value.numerator}/{value.denominator}"


def _convert(value: Any) -> Any:
    if isinstance(value, dict):
        return dict_to_report_output(value)
    if isinstance(value, (list, tuple)):
        return [_convert(v) for v in value]
    if isinstance(value, Fraction):
        return format_rational(value)
    return value


def dict_to_report_output(d: Dict) -> Dict:
    """Convert a result dict to the format of a JSON report.

    All `_` in the keys are replaced with `-`, rationals become "num/den"
    strings and tuples become lists. This is applied recursively to nested
    dicts and lists.

    For example:
        {"lym_sum": Fraction(1, 2)} -> {"lym-sum": "1/2"}
        {"a_b": {"c_d": (1, 2)}} -> {"a-b": {"c-d": [1, 2]}}

    """
    ret = {}
    for k, v in d.items():
        k = str(k).replace("_", "-")
        ret[k] = _convert(v)
    return ret


def report_to_json(report: Dict) -> str:
    """Serialise a report deterministically."""
    return json.dumps(report, sort_keys=True, indent=2)


def _flatten(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def render_table(report: Dict) -> str:
    """Render a converted report with the human-readable template."""
    with open(REPORT_TEMPLATE_PATH) as file:
        template = Template(file.read())
    return template.render(
        command=report["command"],
        parameters={k: _flatten(v) for k, v in sorted(report["parameters"].items())},
        results={k: _flatten(v) for k, v in sorted(report["results"].items())},
        provenance={k: _flatten(v) for k, v in sorted(report["provenance"].items())},
    )

"""Synthetic reasoning corpora, trace verification, rewards and budgets."""

import json
from fractions import Fraction

from . import _reasonforge as _core
from ._reasonforge import Error, WIRE_VERSION, budget_table, canonicalize, recipe_presets, run_cli, template_ids

__all__ = [
    "Error",
    "WIRE_VERSION",
    "allocate",
    "budget_table",
    "canonicalize",
    "content_hash",
    "make_record",
    "parse_trace",
    "pass_at_k",
    "recipe_presets",
    "run_cli",
    "score",
    "template_ids",
]


def make_record(template_id, op_min=2, op_max=10, mode="FORWARD", seed=0):
    return json.loads(_core.make_record(template_id, op_min, op_max, mode, seed))


def parse_trace(solution, answer=""):
    return json.loads(_core.parse_trace(solution, answer))


def score(gold_graph, solution, gold_answer=None, reward="strict"):
    if isinstance(gold_graph, dict):
        if gold_answer is None:
            gold_answer = gold_graph["answer"]
        gold_graph = json.dumps(gold_graph)
    elif gold_answer is None:
        gold_answer = json.loads(gold_graph)["answer"]
    return json.loads(_core.score(gold_graph, solution, gold_answer, reward))


def pass_at_k(n, c, k):
    num, den = _core.pass_at_k(n, c, k)
    return Fraction(int(num), int(den))


def allocate(total, beta):
    return json.loads(_core.allocate(str(total), str(beta)))


def content_hash(data):
    if isinstance(data, str):
        data = data.encode("utf-8")
    return _core.content_hash(data)

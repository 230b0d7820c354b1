import json
import os

import pytest

from tslsynth import parse_spec, encode, synthesize, Limits

CORPUS = os.path.join(os.path.dirname(__file__), os.pardir,
                      "src", "tslsynth", "benchmarks")


def corpus_path(name):
    return os.path.abspath(os.path.join(CORPUS, name))


def load_corpus(name):
    with open(corpus_path(name)) as fh:
        return parse_spec(fh.read())


@pytest.fixture(scope="session")
def button():
    formula, symtab = load_corpus("button.tsl")
    return formula, symtab, encode(formula, symtab)


@pytest.fixture(scope="session")
def button_machine(button):
    _, _, spec = button
    result = synthesize(spec, Limits(seconds=30))
    assert result.status == "realizable"
    return result.machine


def write_json(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)

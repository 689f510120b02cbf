import functools
import sys

import pytest
from hypothesis import settings

from lps import (ArbitrationPolicy, corpus_text, parse_choice_script, parse_event_script,
                 parse_program, run_system)

settings.register_profile("default", deadline=None)
settings.load_profile("default")

CORPUS = ("dining", "blocks", "emergency", "dialogue")
SCRIPTED = ("dining", "dialogue")  # corpus entries shipped with an arbitration script


@functools.lru_cache(maxsize=None)
def program(name):
    return parse_program(corpus_text(f"{name}.lps"))


@functools.lru_cache(maxsize=None)
def corpus_run(name, scripted=True):
    p = program(name)
    script = parse_event_script(corpus_text(f"{name}.evs"), p)
    policy = ArbitrationPolicy()
    if scripted and name in SCRIPTED:
        policy = ArbitrationPolicy("scripted", choices=parse_choice_script(corpus_text(f"{name}.arb")))
    return run_system(p, script, None, policy)


@pytest.fixture
def dining():
    return program("dining")


@pytest.fixture
def blocks():
    return program("blocks")


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(acceptance.RESULTS):
            terminalreporter.write_line(acceptance.RESULTS[n])

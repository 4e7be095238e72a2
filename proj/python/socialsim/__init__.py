"""Python bindings for the socialsim engine.

Events and projections cross the boundary as JSON and come back as dicts.
"""

import json

from . import _socialsim
from ._socialsim import SocialError, diagnostic_codes, format_scenario, replay

__all__ = ["Session", "SocialError", "parse", "format_scenario", "replay", "diagnostic_codes"]


def parse(text):
    """Returns {"ok": bool, "diagnostics": [...]}."""
    return json.loads(_socialsim.parse(text))


class Session:
    def __init__(self, scenario_text, seed):
        self._s = _socialsim.Session(scenario_text, seed)

    def tick(self, count=1):
        events = []
        for _ in range(count):
            events.extend(json.loads(self._s.tick()))
        return events

    def player_initiate(self, exchange, target, subject=None):
        return self._s.player_initiate(exchange, target, subject)

    def player_respond(self, quest, choice):
        return json.loads(self._s.player_respond(quest, choice))

    def log_text(self):
        return self._s.log_text()

    def events(self):
        return [json.loads(line) for line in self._s.log_text().splitlines()]

    def state(self):
        return json.loads(self._s.state())

    def debug_state(self):
        return json.loads(self._s.debug_state())

    @property
    def awaiting_player(self):
        return self._s.awaiting_player

    @property
    def tick_count(self):
        return self._s.tick_count

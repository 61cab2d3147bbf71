"""Flat ``key = value`` scenario files.

Grammar, one entry per line::

    # comment (also after a value: "key = 1  # note")
    kind = transport
    moving_chart = expand_sphere
    moving_chart.R0 = 1
    t = 0
    quad.order = 16

Keys are dotted identifiers; values run to the end of the line.  Blank lines
are ignored and a key may appear only once.  Numbers accept constant
expressions such as ``2*pi/3``.  Every key must be consumed by the scenario
that reads the file, so a typo is reported with its line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ConfigParse, ContractViolation
from .expression import evaluate_number

KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_0-9][A-Za-z0-9_]*)*$")
TRUE = {"true", "yes", "on", "1"}
FALSE = {"false", "no", "off", "0"}


@dataclass
class Entry:
    value: str
    line: int


@dataclass
class ScenarioConfig:
    path: str
    entries: dict
    used: set = field(default_factory=set)

    # -- raw access ------------------------------------------------------------
    def __contains__(self, key):
        return key in self.entries

    def _entry(self, key):
        self.used.add(key)
        return self.entries[key]

    def error(self, key, message):
        line = self.entries[key].line if key in self.entries else None
        return ConfigParse(message, self.path, line)

    def get_str(self, key, default=None, required=False):
        if key not in self.entries:
            if required:
                raise ConfigParse(f"missing required key {key!r}", self.path, None)
            return default
        return self._entry(key).value

    def get_float(self, key, default=None, required=False):
        raw = self.get_str(key, None, required)
        if raw is None:
            return default
        try:
            return evaluate_number(raw)
        except ContractViolation as exc:
            raise self.error(key, f"{key}: {exc}") from None

    def get_int(self, key, default=None, required=False):
        value = self.get_float(key, None, required)
        if value is None:
            return default
        if value != int(value):
            raise self.error(key, f"{key} must be an integer")
        return int(value)

    def get_bool(self, key, default=False):
        raw = self.get_str(key)
        if raw is None:
            return default
        low = raw.lower()
        if low in TRUE:
            return True
        if low in FALSE:
            return False
        raise self.error(key, f"{key} must be true or false")

    def get_floats(self, key, default=None, length=None):
        raw = self.get_str(key)
        if raw is None:
            return default
        try:
            values = [evaluate_number(p) for p in raw.split(",")]
        except ContractViolation as exc:
            raise self.error(key, f"{key}: {exc}") from None
        if length is not None and len(values) != length:
            raise self.error(key, f"{key} needs {length} comma-separated numbers")
        return values

    def params(self, prefix, defaults):
        """Sub-keys ``prefix.name`` typed after the catalog defaults."""
        out = {}
        head = prefix + "."
        for key in self.entries:
            if not key.startswith(head) or "." in key[len(head):]:
                continue
            name = key[len(head):]
            if name not in defaults:
                raise self.error(key, f"{prefix} has no parameter {name!r}")
            default = defaults[name]
            if isinstance(default, str):
                out[name] = self.get_str(key)
            elif isinstance(default, bool):
                out[name] = self.get_bool(key)
            elif isinstance(default, int):
                out[name] = self.get_int(key)
            else:
                out[name] = self.get_float(key)
        return out

    def check_all_used(self):
        for key, entry in self.entries.items():
            if key not in self.used:
                raise ConfigParse(f"unknown key {key!r}", self.path, entry.line)

    def echo(self):
        return {k: e.value for k, e in sorted(self.entries.items())}


def parse_text(text, path="<string>"):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse("expected 'key = value'", path, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not KEY_RE.match(key):
            raise ConfigParse(f"malformed key {key!r}", path, lineno)
        if not value:
            raise ConfigParse(f"empty value for {key!r}", path, lineno)
        if key in entries:
            raise ConfigParse(f"duplicate key {key!r} (first on line {entries[key].line})",
                              path, lineno)
        entries[key] = Entry(value, lineno)
    if "kind" not in entries:
        raise ConfigParse("missing required key 'kind'", path, None)
    return ScenarioConfig(path, entries)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParse(f"cannot read file: {exc.strerror}", str(path), None) from None
    except UnicodeDecodeError:
        raise ConfigParse("file is not valid UTF-8", str(path), None) from None
    return parse_text(text, str(path))


__all__ = ["ScenarioConfig", "parse_text", "load"]

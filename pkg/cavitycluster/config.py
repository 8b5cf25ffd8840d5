#
# Copyright (c) 2024 The cavity-cluster contributors
#
# This program and the accompanying materials are made available under the
# terms of the Eclipse Public License 2.0 which is available at
# http://www.eclipse.org/legal/epl-2.0, or the Apache License, Version 2.0
# which is available at https://www.apache.org/licenses/LICENSE-2.0.
#
# SPDX-License-Identifier: EPL-2.0 OR Apache-2.0
#
import copy
import json
import os
from typing import Any

import json5

from .errors import ConfigError

CONFIG_ENV = "CAVITYCLUSTER_CONFIG"

DEFAULT_CONFIG = {
    "model": {
        "omega_d": 0.0,
        "omega_0": 0.0,
        "g": 50.0,
        "A": 1.0,
        "kappa": 0.0,
        "gamma": 0.0,
        "n_max": 2,
        "detunings": {},
    },
    "dynamics": {
        "dt": 0.02,
        "decay_during_idle": True,
        "checkpoint_every": 10,
        "error_tolerance": 1e-6,
    },
    "fabrication": {
        "delta_off": 16.0,
        "decay": 0.0,
        "postselect": False,
        "frame_correction": True,
        "stark_compensation": True,
    },
    "mbqc": {
        "seed": 0,
        "vertical_edges": "fresh",
    },
    "runtime": {
        "threads": 0,
        "dense_budget": 4096,
    },
}

class Config:
    """
    The configuration of a simulation.

    It is a JSON5 document whose defaults are ``DEFAULT_CONFIG``. Energies are in units of the hopping ``A``.
    Values are addressed with ``/``-separated paths such as ``model/g``.
    """
    def __init__(self):
        self._doc_ = copy.deepcopy(DEFAULT_CONFIG)

    @staticmethod
    def from_file(filename: str) -> 'Config':
        """
        Reads the configuration from a file.
        The file's extension must be json or json5.
        """
        _, ext = os.path.splitext(filename)
        if ext not in (".json", ".json5"):
            raise ConfigError(f"unsupported config extension {ext!r} for {filename}")
        try:
            with open(filename, "r", encoding="utf-8") as f:
                return Config.from_json5(f.read())
        except OSError as e:
            raise ConfigError(f"cannot read config {filename}: {e}") from e

    @staticmethod
    def from_env() -> 'Config':
        "Reads the file named by ``CAVITYCLUSTER_CONFIG`` if set, the defaults otherwise."
        path = os.environ.get(CONFIG_ENV)
        return Config.from_file(path) if path else Config()

    @staticmethod
    def from_obj(obj) -> 'Config':
        """
        Reads the configuration from ``obj`` as if it was a JSON file.
        """
        return Config.from_json5(json.dumps(obj))

    @staticmethod
    def from_json5(text: str) -> 'Config':
        """
        Reads the configuration from a JSON5 string, merged over the defaults.

        JSON5 is a superset of JSON, so any JSON string is a valid input for this function.
        """
        try:
            obj = json5.loads(text)
        except ValueError as e:
            raise ConfigError(f"invalid JSON5 configuration: {e}") from e
        if not isinstance(obj, dict):
            raise ConfigError("the configuration must be an object")
        c = Config()
        _merge(c._doc_, obj)
        return c

    def get(self, path: str, default: Any = None) -> Any:
        node = self._doc_
        for key in _split(path):
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        return copy.deepcopy(node)

    def get_json(self, path: str) -> str:
        """
        Returns the part of the configuration at ``path``,
        in a JSON-serialized form.

        Note that the path is `/`-separated.
        """
        missing = object()
        value = self.get(path, missing)
        if value is missing:
            raise ConfigError(f"no configuration value at {path!r}")
        return json.dumps(value, sort_keys=True)

    def insert_json5(self, path: str, value: str):
        """
        Inserts the provided value (read as a JSON5 string) at the given path in the configuration.

        Note that the path is `/`-separated.
        """
        keys = _split(path)
        if not keys:
            raise ConfigError("empty configuration path")
        try:
            parsed = json5.loads(value)
        except ValueError as e:
            raise ConfigError(f"invalid JSON5 value for {path!r}: {e}") from e
        node = self._doc_
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"{path!r} crosses a non-object value")
        node[keys[-1]] = parsed

    def to_obj(self) -> dict:
        return copy.deepcopy(self._doc_)

    def __repr__(self):
        return f"Config({json.dumps(self._doc_, sort_keys=True)})"

def _split(path: str):
    return [k for k in path.split("/") if k]

def _merge(into: dict, other: dict):
    for key, value in other.items():
        if isinstance(value, dict) and isinstance(into.get(key), dict):
            _merge(into[key], value)
        else:
            into[key] = value

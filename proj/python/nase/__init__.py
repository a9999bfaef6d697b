# Copyright 2026 The NASE Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python interface to the NASE command implementations."""

import json
import os

from . import _nase
from ._nase import DataError, NaseError

__all__ = ["DataError", "NaseError", "resolve_config", "synth", "stats", "search", "train",
           "evaluate", "derive"]


def resolve_config(config=None, **overrides):
    """Returns the full run config after applying overrides and NASE_SEED."""
    merged = dict(config or {}, **overrides)
    return json.loads(_nase.resolve_config(json.dumps(merged)))


def synth(out_dir, n_entities=200, n_relations=6, mix="symmetric=1,compositional=1", seed=1):
    return json.loads(_nase.synth(n_entities, n_relations, mix, seed, os.fspath(out_dir)))


def stats(dataset_dir):
    return json.loads(_nase.stats(os.fspath(dataset_dir)))


def search(config=None, **overrides):
    """Runs search and derivation; artifacts land in config["out_dir"]."""
    return json.loads(_nase.search(json.dumps(dict(config or {}, **overrides))))


def train(genotype, config=None, **overrides):
    merged = json.dumps(dict(config or {}, **overrides))
    return json.loads(_nase.train(merged, os.fspath(genotype)))


def evaluate(model, dataset_dir, protocol="filtered", tie_policy="mean", split="test"):
    return json.loads(_nase.evaluate(os.fspath(model), os.fspath(dataset_dir), protocol,
                                     tie_policy, split))


def derive(checkpoint):
    return json.loads(_nase.derive(os.fspath(checkpoint)))

"""Run manifests: what a command did, with which seed and which versions."""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import json
import platform
import time
from dataclasses import asdict, dataclass, field

import numpy
import scipy

from ..version import __version__


def component_versions():
    return {'twlab': __version__, 'numpy': numpy.__version__,
            'scipy': scipy.__version__, 'python': platform.python_version()}


@dataclass
class RunManifest(object):
    command: str
    config: dict
    master_seed: int
    versions: dict = field(default_factory=component_versions)
    outputs: list = field(default_factory=list)
    duration_seconds: float = 0.0
    started: float = field(default_factory=time.time, repr=False)

    def finish(self, outputs=()):
        self.outputs.extend(str(x) for x in outputs)
        self.duration_seconds = round(time.time() - self.started, 3)
        return self

    def to_json(self):
        data = asdict(self)
        del data['started']
        return json.dumps(data, indent=2, sort_keys=True, default=str)

    def write(self, path):
        self.outputs.append(str(path))
        with open(path, 'w') as fobj:
            fobj.write(self.to_json() + '\n')
        return path

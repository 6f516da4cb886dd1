"""
Run manifest written next to every command's output.
"""
import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Dict, Optional

from app import __version__
from app.utils.io import MANIFEST_FILE, write_json
from app.utils.timezone import isoformat


def config_hash(config: Dict) -> str:
    """SHA-256 of the canonical JSON of a command configuration (output path excluded)."""
    canonical = {key: value for key, value in config.items() if key != 'out'}
    payload = json.dumps(canonical, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


@dataclass
class RunManifest:
    command: str
    config_hash: str
    seed: Optional[int] = None
    tool_version: str = __version__
    started_at: str = field(default_factory=isoformat)
    finished_at: Optional[str] = None
    extra: Dict = field(default_factory=dict)

    @classmethod
    def start(cls, command: str, config: Dict, seed: Optional[int] = None) -> 'RunManifest':
        return cls(command=command, config_hash=config_hash(config), seed=seed)

    def finish(self, **extra) -> 'RunManifest':
        self.extra.update(extra)
        self.finished_at = isoformat()
        return self

    def to_dict(self) -> Dict:
        return {
            'command': self.command,
            'config_hash': self.config_hash,
            'seed': self.seed,
            'tool_version': self.tool_version,
            'started_at': self.started_at,
            'finished_at': self.finished_at,
            'extra': self.extra,
        }

    def write(self, directory: str) -> str:
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, MANIFEST_FILE)
        write_json(path, self.to_dict(), report='manifest')
        return path

"""
Run manifest: what was run, with which config and seed, on which stack.
"""

import platform
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Union

from configs.config_loader import MANIFEST_KIND
from configs.schema import ExperimentConfig
from utils.output import write_json

MANIFEST_FILE = "manifest.json"
TRACKED_PACKAGES = ("numpy", "scipy", "pydantic", "loguru")


def package_versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "not-installed"
    return versions


def build_manifest(command: str, cfg: ExperimentConfig, outputs: List[Union[str, Path]],
                   trace_id: str, duration_seconds: float, summary: Dict = None) -> Dict:
    """
    Manifest dict. ``config`` is a full echo; passing the manifest back as
    ``--config`` replays the run.
    """
    return {
        "kind": MANIFEST_KIND,
        "command": command,
        "seed": cfg.seed,
        "trace_id": trace_id,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "duration_seconds": round(duration_seconds, 3),
        "versions": package_versions(),
        "outputs": sorted(Path(p).name for p in outputs),
        "summary": summary or {},
        "config": cfg.model_dump(mode="json"),
    }


def write_manifest(out_dir: Union[str, Path], manifest: Dict) -> Path:
    return write_json(Path(out_dir) / MANIFEST_FILE, manifest)

"""
Storage service for weight-vector caches, enumeration outputs and input documents
"""

import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, Optional, Union

from pydantic import ValidationError

from balanced import __version__
from balanced.config import config
from balanced.models import Collection, LambdaSet, MinimalCollection, TUGame, ZeroOneMatrix
from balanced.utils.logging_utils import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


class LambdaCacheStore:
    """Per-m JSON cache of weight-vector sets, invalidated by package version"""

    def __init__(self, cache_dir: Optional[PathLike] = None):
        """Initialize cache directory"""
        self.cache_dir = Path(cache_dir or config.CACHE_DIR)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        logger.debug(f"[Storage] Weight-vector cache at {self.cache_dir}")

    def path_for(self, m: int) -> Path:
        return self.cache_dir / f"lambda_m{m}.json"

    def load(self, m: int) -> Optional[LambdaSet]:
        """Cached set for m, or None when missing, stale or unreadable"""
        path = self.path_for(m)
        if not path.exists():
            return None
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"[Storage] Ignoring unreadable cache {path}: {e}")
            return None

        if data.get("version") != __version__:
            logger.info(f"[Storage] Cache {path} has version {data.get('version')}, expected {__version__}; regenerating")
            return None
        try:
            lam = LambdaSet.model_validate({"m": data["m"], "classes": data["classes"]})
        except (KeyError, ValidationError) as e:
            logger.warning(f"[Storage] Ignoring malformed cache {path}: {e}")
            return None
        if lam.m != m:
            logger.warning(f"[Storage] Cache {path} holds m={lam.m}, expected {m}")
            return None
        logger.debug(f"[Storage] Loaded {len(lam.classes)} classes for m={m}")
        return lam

    def save(self, lam: LambdaSet) -> Path:
        path = self.path_for(lam.m)
        payload = lam.model_dump(mode="json")
        payload["version"] = __version__
        payload["created_at"] = datetime.now().isoformat()
        tmp = path.with_suffix(".json.tmp")
        with open(tmp, "w") as f:
            json.dump(payload, f, indent=2)
        tmp.replace(path)
        logger.info(f"[Storage] Cached {len(lam.classes)} classes for m={lam.m} at {path}")
        return path


def write_collections_jsonl(path: PathLike, items: Iterable[MinimalCollection]) -> int:
    """Stream collections with weights to a JSON-lines file; returns the number written"""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    count = 0
    with open(path, "w") as f:
        for item in items:
            f.write(json.dumps(item.to_payload(), separators=(",", ":")))
            f.write("\n")
            count += 1
    logger.info(f"[Storage] Wrote {count} collections to {path}")
    return count


def read_collections_jsonl(path: PathLike) -> Iterator[MinimalCollection]:
    """Stream collections back from a JSON-lines file"""
    with open(path, "r") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield MinimalCollection.from_payload(json.loads(line))
            except (json.JSONDecodeError, KeyError, ValidationError) as e:
                raise ValueError(f"{path}:{line_number}: invalid collection record: {e}") from e


def _read_json(path: PathLike) -> Dict[str, Any]:
    with open(path, "r") as f:
        return json.load(f)


def load_game(path: PathLike) -> TUGame:
    """Game document {"n": 3, "v": ["0", ...]} indexed by coalition mask"""
    return TUGame.model_validate(_read_json(path))


def dump_game(game: TUGame, path: PathLike) -> None:
    with open(path, "w") as f:
        json.dump(game.model_dump(mode="json"), f)


def load_matrix(path: PathLike) -> ZeroOneMatrix:
    """Matrix document {"n": 3, "columns": [[1, 2], [1, 3], [2, 3]]}"""
    return ZeroOneMatrix.from_payload(_read_json(path))


def load_collection(path: PathLike) -> Collection:
    """Collection document {"n": 4, "sets": [[1], [2, 3], ...]}"""
    return Collection.from_payload(_read_json(path))

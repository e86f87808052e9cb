import json
import logging
import threading
from pathlib import Path
from typing import Dict, Iterator, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dmn import deserialize_graph
from ir import DecisionGraph

from .generation import Validity

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"
MANIFEST_FILE = "manifest.json"


def record_key(target_model_id: str, condition: str, run_index: int) -> str:
    return f"{target_model_id}|{condition}|{run_index}"


class RunRecord(BaseModel):
    """One generation attempt"""
    model_config = ConfigDict(frozen=True)

    target_model_id: str
    condition: str
    run_index: int = Field(ge=0)
    example_model_id: str
    example_with_replacement: bool = False
    prompt_hash: str
    template_version: str
    raw_response: str = ""
    parsed_graph: Optional[str] = None
    validity: Validity
    detail: str = ""
    flags: List[str] = Field(default_factory=list)
    attempts: int = 0
    latency_seconds: float = 0.0
    usage: Dict[str, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _graph_iff_parsed(self) -> 'RunRecord':
        if (self.parsed_graph is not None) != (self.validity is Validity.PARSED):
            raise ValueError("parsed_graph is present exactly when validity is Parsed")
        return self

    @property
    def key(self) -> str:
        return record_key(self.target_model_id, self.condition, self.run_index)

    def graph(self) -> Optional[DecisionGraph]:
        return deserialize_graph(self.parsed_graph.encode("utf-8")) if self.parsed_graph is not None else None


class RunStore:
    """Append-only line-delimited records plus a manifest of completed keys"""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.records_path = self.out_dir / RECORDS_FILE
        self.manifest_path = self.out_dir / MANIFEST_FILE
        self._lock = threading.Lock()
        self._keys = {record.key for record in self.read()}

    def __contains__(self, key: str) -> bool:
        return key in self._keys

    def __len__(self) -> int:
        return len(self._keys)

    def read(self) -> Iterator[RunRecord]:
        return read_records(self.records_path)

    def append(self, record: RunRecord):
        with self._lock:
            if record.key in self._keys:
                logger.debug("Record %s already stored", record.key)
                return
            self.out_dir.mkdir(parents=True, exist_ok=True)
            with self.records_path.open("a", encoding="utf-8") as handle:
                handle.write(record.model_dump_json() + "\n")
            self._keys.add(record.key)
            self._write_manifest()

    def _write_manifest(self):
        document = {"completed": sorted(self._keys)}
        self.manifest_path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


def read_records(records_path: Path) -> Iterator[RunRecord]:
    if not records_path.exists():
        return
    with records_path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield RunRecord.model_validate_json(line)
            except ValueError as e:
                # a torn last line from an interrupted run
                logger.warning("Ignoring unreadable record at %s:%d: %s", records_path, line_number, e)


def load_records(path) -> List[RunRecord]:
    """Records from a run directory or a records file"""
    path = Path(path)
    return list(read_records(path / RECORDS_FILE if path.is_dir() else path))

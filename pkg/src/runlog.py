import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional


def utc_now() -> str:
	return datetime.now(timezone.utc).isoformat(timespec="seconds")


class JsonlRunLog:
	def __init__(self, path: Path, dry_run: bool = False):
		"""Append-only record of solved instances backed by a JSONL file."""
		self.path = Path(path)
		self.dry_run = dry_run
		self.records: List[Dict[str, Any]] = []

		if self.path.exists():
			self._load()

	def _load(self):
		with open(self.path, "r", encoding="utf-8") as f:
			for line in f:
				line = line.strip()
				if not line:
					continue
				try:
					obj = json.loads(line)
					if not isinstance(obj, dict) or "instance" not in obj:
						continue
					self.records.append(obj)
				except Exception:
					# A corrupt record must not break the load.
					continue

	def latest(self, instance: str) -> Optional[Dict[str, Any]]:
		"""Most recent record for the instance name, if any."""
		for record in reversed(self.records):
			if record.get("instance") == instance:
				return record
		return None

	def append(self, record: Dict[str, Any]) -> Dict[str, Any]:
		"""Stamp and append a record; nothing is written in dry-run mode."""
		entry = {"time": utc_now(), **record}
		self.records.append(entry)
		if self.dry_run:
			return entry
		self.path.parent.mkdir(parents=True, exist_ok=True)
		with open(self.path, "a", encoding="utf-8") as f:
			f.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")
		return entry

"""Transfer records, address labels and entity grouping.

Everything here is file based: transfers come from CSV or JSONL with the
columns ``block_number,timestamp,tx_hash,from,to,token,value``, labels from
a CSV with ``address,name_tag,account_type``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Sequence

TRANSFER_FIELDS = ("block_number", "timestamp", "tx_hash", "from", "to", "token", "value")
LABEL_FIELDS = ("address", "name_tag", "account_type")
ACCOUNT_TYPES = ("EOA", "CA", "unknown")


class ParseError(ValueError):
    """Malformed input row. Carries the 1-based line number and field name."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None,
                 source: str | None = None):
        self.line = line
        self.field = field
        self.source = source
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class TransferRecord:
    block_number: int
    timestamp: datetime
    tx_hash: str
    from_addr: str
    to_addr: str
    token: str
    value: str

    def __post_init__(self):
        if not self.from_addr or not self.to_addr or not self.token:
            raise ValueError("from_addr, to_addr and token must be non-empty")
        if self.block_number < 0:
            raise ValueError("block_number must be non-negative")


@dataclass(frozen=True)
class AddressLabel:
    address: str
    name_tag: str | None = None
    account_type: str = "unknown"


@dataclass(frozen=True)
class EntityMap:
    """Address -> entity assignment.

    ``entity_of`` maps an address to its entity id, ``names`` an entity id to
    its display name and ``ego`` an entity id to its ego flag. Addresses that
    were never labelled resolve to singleton, non-ego entities.
    """

    entity_of: dict[str, str] = field(default_factory=dict)
    names: dict[str, str] = field(default_factory=dict)
    ego: dict[str, bool] = field(default_factory=dict)

    def entity(self, address: str) -> str:
        return self.entity_of.get(address, address)

    def name(self, entity_id: str) -> str:
        return self.names.get(entity_id, entity_id)

    def is_ego(self, entity_id: str) -> bool:
        return self.ego.get(entity_id, False)

    def entities(self) -> list[str]:
        return list(self.names)


def parse_timestamp(raw: str) -> datetime:
    """Parse unix seconds or ISO-8601 into an aware UTC datetime (seconds precision)."""
    text = raw.strip()
    if not text:
        raise ValueError("empty timestamp")
    try:
        seconds = int(text)
    except ValueError:
        seconds = None
    if seconds is not None:
        return datetime.fromtimestamp(seconds, tz=timezone.utc)
    iso = text[:-1] + "+00:00" if text.endswith(("Z", "z")) else text
    try:
        ts = datetime.fromisoformat(iso)
    except ValueError:
        raise ValueError(f"unparseable timestamp {raw!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _record_from_row(row: dict, line: int, source: str | None) -> TransferRecord:
    values = {}
    for name in TRANSFER_FIELDS:
        raw = row.get(name)
        if raw is None:
            raise ParseError("missing field", line, name, source)
        values[name] = str(raw).strip()
    for name in ("from", "to", "token", "tx_hash", "block_number", "timestamp"):
        if not values[name]:
            raise ParseError("empty value", line, name, source)
    try:
        block = int(values["block_number"])
    except ValueError:
        raise ParseError(f"not an integer: {values['block_number']!r}", line,
                         "block_number", source) from None
    if block < 0:
        raise ParseError("negative block number", line, "block_number", source)
    try:
        ts = parse_timestamp(values["timestamp"])
    except ValueError as exc:
        raise ParseError(str(exc), line, "timestamp", source) from None
    return TransferRecord(
        block_number=block,
        timestamp=ts,
        tx_hash=values["tx_hash"].lower(),
        from_addr=values["from"].lower(),
        to_addr=values["to"].lower(),
        token=values["token"].lower(),
        value=values["value"],
    )


def _text(source: IO) -> io.TextIOBase:
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def parse_transfers(source: IO, format: str = "csv", name: str | None = None) -> list[TransferRecord]:
    """Read transfer records from a byte (or text) stream.

    Records come back in source order, duplicates included. Addresses, hashes
    and tokens are lowercased; ``value`` is kept verbatim.
    """
    stream = _text(source)
    records = []
    if format == "csv":
        reader = csv.DictReader(stream)
        if reader.fieldnames is None:
            return records
        header = [h.strip() for h in reader.fieldnames]
        missing = [f for f in TRANSFER_FIELDS if f not in header]
        if missing:
            raise ParseError(f"header lacks columns {missing}", 1, missing[0], name)
        reader.fieldnames = header
        for row in reader:
            if None in row:
                raise ParseError("too many columns", reader.line_num, None, name)
            records.append(_record_from_row(row, reader.line_num, name))
    elif format == "jsonl":
        for line_no, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line_no, None, name) from None
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", line_no, None, name)
            records.append(_record_from_row(obj, line_no, name))
    else:
        raise ValueError(f"unknown transfer format {format!r}")
    return records


def serialize_transfers(records: Iterable[TransferRecord], sink: IO[str], format: str = "csv") -> None:
    if format == "csv":
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(TRANSFER_FIELDS)
        for r in records:
            writer.writerow([r.block_number, format_timestamp(r.timestamp), r.tx_hash,
                             r.from_addr, r.to_addr, r.token, r.value])
    elif format == "jsonl":
        for r in records:
            obj = dict(zip(TRANSFER_FIELDS, (r.block_number, format_timestamp(r.timestamp),
                                             r.tx_hash, r.from_addr, r.to_addr, r.token, r.value)))
            sink.write(json.dumps(obj) + "\n")
    else:
        raise ValueError(f"unknown transfer format {format!r}")


def parse_labels(source: IO, name: str | None = None) -> list[AddressLabel]:
    stream = _text(source)
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        return []
    header = [h.strip() for h in reader.fieldnames]
    if "address" not in header:
        raise ParseError("header lacks column 'address'", 1, "address", name)
    reader.fieldnames = header
    labels = []
    seen = set()
    for row in reader:
        address = (row.get("address") or "").strip().lower()
        if not address:
            raise ParseError("empty value", reader.line_num, "address", name)
        if address in seen:
            raise ParseError(f"duplicate address {address}", reader.line_num, "address", name)
        seen.add(address)
        tag = (row.get("name_tag") or "").strip() or None
        kind = (row.get("account_type") or "").strip() or "unknown"
        if kind not in ACCOUNT_TYPES:
            raise ParseError(f"account_type must be one of {ACCOUNT_TYPES}", reader.line_num,
                             "account_type", name)
        labels.append(AddressLabel(address, tag, kind))
    return labels


def read_lines(source: IO) -> list[str]:
    """One item per non-blank line; ``#`` starts a comment line."""
    stream = _text(source)
    out = []
    for line in stream:
        item = line.strip()
        if item and not item.startswith("#"):
            out.append(item)
    return out


def grouping_key(name_tag: str) -> str:
    # split at the first ":" only, contract names may contain more
    head, sep, _ = name_tag.partition(":")
    return head.strip() if sep else name_tag.strip()


def build_entity_map(labels: Sequence[AddressLabel], ego_tags: Iterable[str] = (),
                     group: bool = True) -> EntityMap:
    """Group labelled addresses into entities by name-tag prefix.

    With ``group=False`` every address stays its own entity (address-level
    view) but still inherits the ego flag from its tag's prefix.
    """
    ego_keys = {t.strip() for t in ego_tags}
    entity_of, names, ego = {}, {}, {}
    for label in labels:
        addr = label.address.lower()
        key = grouping_key(label.name_tag) if label.name_tag else None
        if group and key:
            eid, display = key, key
        else:
            eid, display = addr, (label.name_tag or addr)
        entity_of[addr] = eid
        names.setdefault(eid, display)
        ego[eid] = ego.get(eid, False) or (key is not None and key in ego_keys)
    return EntityMap(entity_of, names, ego)


def filter_transfers(records: Iterable[TransferRecord], allowlist: Iterable[str] | None,
                     window: tuple[datetime, datetime] | None = None) -> list[TransferRecord]:
    """Keep records whose token is allowlisted and whose timestamp is in ``[start, end)``.

    ``allowlist=None`` disables token filtering; an empty allowlist removes
    everything.
    """
    if window is not None:
        start, end = window
        if start >= end:
            raise ValueError(f"empty window: start {start} >= end {end}")
    allowed = None if allowlist is None else {t.strip().lower() for t in allowlist}
    out = []
    for r in records:
        if allowed is not None and r.token not in allowed:
            continue
        if window is not None and not (start <= r.timestamp < end):
            continue
        out.append(r)
    return out


def load_transfers(path, format: str | None = None) -> list[TransferRecord]:
    path = str(path)
    if format is None:
        format = "jsonl" if path.endswith((".jsonl", ".ndjson")) else "csv"
    with open(path, "rb") as fh:
        return parse_transfers(fh, format, name=path)


def load_labels(path) -> list[AddressLabel]:
    with open(path, "rb") as fh:
        return parse_labels(fh, name=str(path))


def load_lines(path) -> list[str]:
    with open(path, "rb") as fh:
        return read_lines(fh)

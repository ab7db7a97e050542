"""
RunReport: what a CLI invocation echoes back. Rendering is deterministic (sorted keys, rows in the
order the command produced them) so identical invocations give byte-identical output.
"""
import csv
import io
import json
import logging
import typing
from dataclasses import dataclass, field

from fockop.fockop_exceptions import PreconditionError
from fockop.operators import SpaceParams

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    command: str
    space: typing.Optional[SpaceParams] = None
    inputs: typing.Dict[str, typing.Any] = field(default_factory=dict)
    outputs: typing.Dict[str, typing.Any] = field(default_factory=dict)
    columns: typing.Tuple[str, ...] = ()
    rows: typing.List[typing.Dict[str, typing.Any]] = field(default_factory=list)
    timing: typing.Optional[float] = None
    fmt: str = 'json'

    def add_row(self, **values):
        unknown = set(values) - set(self.columns)
        assert not unknown, f'row has columns {sorted(unknown)} outside {self.columns}'
        self.rows.append(values)

    def to_dict(self) -> typing.Dict[str, typing.Any]:
        out = {
            'command': self.command,
            'inputs': self.inputs,
            'outputs': dict(self.outputs),
        }
        if self.space is not None:
            out['space'] = {'n': self.space.n, 'm': self.space.m}
        if self.columns:
            out['outputs']['rows'] = [{c: row.get(c) for c in self.columns} for row in self.rows]
        if self.timing is not None:
            out['timing'] = {'seconds': round(self.timing, 3)}
        return out

    def render(self, fmt: str = None) -> str:
        fmt = fmt or self.fmt
        if fmt == 'json':
            return render_json(self)
        if fmt == 'table':
            return render_table(self)
        if fmt == 'csv':
            return render_csv(self)
        raise PreconditionError(f'Unknown output format "{fmt}"')


def render_json(report: RunReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def _flatten(prefix: str, value, out: typing.List[typing.Tuple[str, str]]):
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f'{prefix}.{key}' if prefix else str(key), value[key], out)
    elif isinstance(value, (list, tuple)) and value and isinstance(value[0], dict):
        for i, item in enumerate(value):
            _flatten(f'{prefix}[{i}]', item, out)
    elif isinstance(value, (list, tuple)):
        out.append((prefix, ', '.join(_cell(v) for v in value)))
    else:
        out.append((prefix, _cell(value)))


def _cell(value) -> str:
    if value is None:
        return '-'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, ensure_ascii=False)
    return str(value)


def render_table(report: RunReport) -> str:
    """
    Human layout: key/value lines for everything outside the rows, then the rows as an aligned table.
    The numbers are the same strings the json layout carries.
    """
    lines = [f'command: {report.command}']
    if report.space is not None:
        lines.append(f'space: n={report.space.n} m={report.space.m}')
    pairs: typing.List[typing.Tuple[str, str]] = []
    _flatten('inputs', report.inputs, pairs)
    _flatten('outputs', report.outputs, pairs)
    if report.timing is not None:
        pairs.append(('timing.seconds', _cell(round(report.timing, 3))))
    width = max((len(k) for k, _ in pairs), default=0)
    lines.extend(f'{k.ljust(width)}  {v}' for k, v in pairs)
    if report.columns:
        table = [list(report.columns)] + [[_cell(row.get(c)) for c in report.columns] for row in report.rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(report.columns))]
        lines.append('')
        for i, r in enumerate(table):
            lines.append('  '.join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip())
            if i == 0:
                lines.append('  '.join('-' * w for w in widths))
    return '\n'.join(lines) + '\n'


def render_csv(report: RunReport) -> str:
    """
    Rows only when the command produced rows (plot data); otherwise flattened key,value pairs.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    if report.columns:
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_cell(row.get(c)) for c in report.columns])
    else:
        pairs: typing.List[typing.Tuple[str, str]] = [('command', report.command)]
        if report.space is not None:
            pairs += [('space.n', str(report.space.n)), ('space.m', str(report.space.m))]
        _flatten('inputs', report.inputs, pairs)
        _flatten('outputs', report.outputs, pairs)
        writer.writerow(('key', 'value'))
        writer.writerows(pairs)
    return buffer.getvalue()


def read_samples_csv(text: str) -> typing.List[typing.Tuple[int, str]]:
    """
    (t, squared_norm text) pairs from a norms CSV; the header must start with t,alpha,squared_norm.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:3]] != ['t', 'alpha', 'squared_norm']:
        raise PreconditionError(f'Expected a CSV header "t,alpha,squared_norm", got {header}')
    samples = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            samples.append((int(row[0]), row[2].strip()))
        except (IndexError, ValueError):
            raise PreconditionError(f'Malformed sample row {line_no}: {row}')
    return samples

import csv
import json
from typing import Dict, List, Sequence

from ..exceptions import NbinException


def _to_json(content: Dict, json_file: str):
    try:
        with open(json_file, 'w', encoding='utf-8') as f:
            json.dump(content, f, indent=1, ensure_ascii=False)
    except OSError as e:
        raise NbinException(message=f'cannot write {json_file}: {e}')
    return json_file


def _to_csv(rows: List[Sequence], header: Sequence[str], csv_file: str):
    try:
        with open(csv_file, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise NbinException(message=f'cannot write {csv_file}: {e}')
    return csv_file

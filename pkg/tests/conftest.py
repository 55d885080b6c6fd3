import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from partsys.assembly import learn_systems
from partsys.synth import clinic_bundle, clinic_pool, clinic_rules


@pytest.fixture(scope="session")
def clinic():
    """The hand-checkable 101-row cohort: bundle, pool, rules, minimal system."""
    bundle = clinic_bundle()
    pool = clinic_pool()
    personalized, baseline = clinic_rules()
    system = learn_systems(bundle, pool, kinds=("minimal",), alpha=0.10, seed=7)[0]
    return {
        "bundle": bundle,
        "pool": pool,
        "personalized": personalized,
        "baseline": baseline,
        "system": system,
    }


@pytest.fixture(scope="session")
def clinic_files(tmp_path_factory):
    """The clinic cohort written to CSV + schema JSON for loader/CLI tests."""
    from partsys.synth import clinic_task, write_dataset_csv, write_schema_json

    root = tmp_path_factory.mktemp("clinic_files")
    d = clinic_task()
    csv_path = root / "clinic.csv"
    schema_path = root / "clinic_schema.json"
    write_dataset_csv(d, csv_path)
    write_schema_json(d, schema_path)
    return {"csv": csv_path, "schema": schema_path, "dataset": d}

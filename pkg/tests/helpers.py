"""Terse record/table builders shared across test modules."""

from __future__ import annotations

import datetime as dt
from typing import Sequence

from burnout.dataset import EmployeeRecord, Table


def make_record(
    employee_id: str = "e-1",
    date_of_joining: dt.date = dt.date(2008, 3, 1),
    gender: str = "Female",
    company_type: str = "Service",
    wfh_setup: str = "Yes",
    designation: int = 2,
    resource_allocation: int | None = 5,
    mental_fatigue_score: float | None = 5.0,
    burn_rate: float | None = 0.5,
) -> EmployeeRecord:
    return EmployeeRecord(
        employee_id=employee_id,
        date_of_joining=date_of_joining,
        gender=gender,
        company_type=company_type,
        wfh_setup=wfh_setup,
        designation=designation,
        resource_allocation=resource_allocation,
        mental_fatigue_score=mental_fatigue_score,
        burn_rate=burn_rate,
    )


def make_table(records: Sequence[EmployeeRecord], source: str = "test") -> Table:
    return Table(records=tuple(records), source=source)

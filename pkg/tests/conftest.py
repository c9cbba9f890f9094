import json

import pytest

from cameo.data.batteries import BatteryConfig
from cameo.data.sites import WindFarmSite
from cameo.registry import ComponentContract, OperationRegistry
from cameo.scenario.sets import ScenarioSet


@pytest.fixture
def hand_site():
    return WindFarmSite("h1", "Hand", 0.0, 0.0, 1.0, 10.0)


@pytest.fixture
def hand_set():
    # two hours: free wind, then a 100 $/MWh hour with no wind
    day = {"wind_factor": [1.0, 0.0], "da_usd_mwh": [0.0, 100.0],
           "rt_usd_mwh": [0.0, 100.0], "res_usd_mw": [0.0, 0.0]}
    return ScenarioSet(set_id="hand", site_id="h1", seed=0, days=(day,), k=1)


def hand_battery(cost_usd_per_kw):
    return BatteryConfig("hand", "x", 1.0, 1.0, cost_usd_per_kw, 1.0)


@pytest.fixture
def tiny_registry():
    """Minimal op set for engine tests: sleep, double, flaky, gather."""
    reg = OperationRegistry()
    state = {"flaky_seen": set()}

    def op_sleep(ctx, value):
        import time
        time.sleep(float(ctx.params.get("sleep_s", 0.02)))
        return {"out": value}

    def op_double(ctx, value):
        return {"out": [value, value]}

    def op_flaky(ctx, value):
        # fails the first time each payload is seen, then succeeds
        marker = ctx.workdir + "/.attempted"
        import os
        if not os.path.exists(marker):
            open(marker, "w").close()
            raise RuntimeError("transient failure")
        return {"out": value}

    def op_fail_on(ctx, value):
        if value == ctx.params.get("poison_value"):
            raise RuntimeError(f"poisoned input {value}")
        return {"out": value}

    def op_gather(ctx, values):
        return {"out": sorted(values, key=json.dumps)}

    reg.register(ComponentContract(op_id="sleep@1", inputs={"value": "Scalar"},
                                   outputs={"out": "Scalar"}), op_sleep)
    reg.register(ComponentContract(op_id="double@1", inputs={"value": "Scalar"},
                                   outputs={"out": "list<Scalar>"},
                                   emits={"out": 2}), op_double)
    reg.register(ComponentContract(op_id="flaky@1", inputs={"value": "Scalar"},
                                   outputs={"out": "Scalar"}), op_flaky)
    reg.register(ComponentContract(op_id="fail_on@1", inputs={"value": "Scalar"},
                                   outputs={"out": "Scalar"}), op_fail_on)
    reg.register(ComponentContract(op_id="gather@1", inputs={"values": "list<Scalar>"},
                                   outputs={"out": "list<Scalar>"}), op_gather)
    return reg


def sweep_workflow(n, process_retries=0, kind="sleep@1"):
    """A one-process workflow fanning a values channel into n tasks."""
    return {
        "schema_version": 1,
        "name": "sweep",
        "params": {"sleep_s": 0.02},
        "channels": [
            {"name": "items", "source": {"type": "values", "items": list(range(n))},
             "ops": []},
        ],
        "processes": [
            {"name": "work", "kind": {"builtin": kind},
             "inputs": {"value": "items"}, "outputs": {"out": "Scalar"},
             "retries": process_retries, "tag": "{ordinal}"},
        ],
    }


def chain_workflow():
    """values -> double (fan-out 2) -> fail_on -> gather (collect)."""
    return {
        "schema_version": 1,
        "name": "chain",
        "params": {},
        "channels": [
            {"name": "items", "source": {"type": "values", "items": [1, 2, 3]},
             "ops": []},
            {"name": "doubled", "source": {"type": "output", "process": "expand",
                                           "port": "out"},
             "ops": [{"op": "flatten"}]},
            {"name": "all", "source": {"type": "output", "process": "filt",
                                       "port": "out"},
             "ops": [{"op": "collect"}]},
        ],
        "processes": [
            {"name": "expand", "kind": {"builtin": "double@1"},
             "inputs": {"value": "items"}, "outputs": {"out": "list<Scalar>"},
             "retries": 0, "tag": "{ordinal}", "emits": {"out": 2}},
            {"name": "filt", "kind": {"builtin": "fail_on@1"},
             "inputs": {"value": "doubled"}, "outputs": {"out": "Scalar"},
             "retries": 0, "tag": "{ordinal}"},
            {"name": "tail", "kind": {"builtin": "gather@1"},
             "inputs": {"values": "all"}, "outputs": {"out": "list<Scalar>"},
             "retries": 0, "tag": "all"},
        ],
    }

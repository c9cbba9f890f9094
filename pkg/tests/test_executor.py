import json
import os
import time

import pytest

from cameo.executor.cache import OUTCOME_NAME, CacheStore, cache_key
from cameo.executor.execute import execute_task
from cameo.executor.retry import RetryPolicy, apply_retry_policy
from cameo.executor.runner import RunOptions, run_workflow
from cameo.executor.task import TaskInstance, TaskOutcome, render_tag
from cameo.workflow.graph import build_dag
from cameo.workflow.parser import parse_workflow
from cameo.workflow.model import ProcessDef

from conftest import chain_workflow, sweep_workflow


def _task(payload, process="p", attempt=1):
    return TaskInstance(task_id="t", process=process, ordinal=0,
                        payload=payload, attempt=attempt)


# --- cache keys ------------------------------------------------------------------

def test_attempt_number_excluded_from_key():
    a = cache_key(_task({"x": 1}, attempt=1), "1")
    b = cache_key(_task({"x": 1}, attempt=3), "1")
    assert a == b
    assert len(a) == 64 and int(a, 16) >= 0


def test_contract_version_participates():
    assert cache_key(_task({"x": 1}), "1") != cache_key(_task({"x": 1}), "2")


def test_payload_key_order_is_canonical():
    assert cache_key(_task({"a": 1, "b": 2}), "1") == \
           cache_key(_task({"b": 2, "a": 1}), "1")


def test_process_name_participates():
    assert cache_key(_task({"x": 1}, process="p"), "1") != \
           cache_key(_task({"x": 1}, process="q"), "1")


# --- cache store -----------------------------------------------------------------

def test_store_lookup_roundtrip(tmp_path):
    store = CacheStore(tmp_path)
    key = "ab" + "0" * 62
    store.store(key, "1", {"out": [1, 2, {"z": 0.5}]}, {"duration_ms": 3.0},
                process="p", task_id="p-0")
    entry = store.lookup(key)
    assert entry is not None
    assert entry.outputs == {"out": [1, 2, {"z": 0.5}]}
    assert entry.version == "1"
    # layout: first-2/rest-62 split of the hex digest
    assert os.path.isdir(tmp_path / "work" / "ab" / ("0" * 62))


def test_lookup_without_manifest_is_a_miss(tmp_path):
    store = CacheStore(tmp_path)
    key = "cd" + "1" * 62
    workdir = store.prepare_workdir(key)
    with open(os.path.join(workdir, "outputs.json"), "w") as fh:
        fh.write('{"out": 1}')
    assert store.lookup(key) is None  # no .outcome manifest: not an entry


def test_corrupted_outputs_read_as_miss(tmp_path):
    store = CacheStore(tmp_path)
    key = "ef" + "2" * 62
    store.store(key, "1", {"out": 42}, {}, process="p", task_id="t")
    with open(os.path.join(store.workdir(key), "outputs.json"), "w") as fh:
        fh.write('{"out": 43}')
    assert store.lookup(key) is None


def test_cached_outputs_byte_identical(tmp_path):
    store = CacheStore(tmp_path)
    key = "aa" + "3" * 62
    outputs = {"x": 0.1, "y": [1, 2, 3]}
    store.store(key, "1", outputs, {}, process="p", task_id="t")
    raw1 = open(os.path.join(store.workdir(key), "outputs.json"), "rb").read()
    entry = store.lookup(key)
    from cameo.payload import canonical_json
    assert canonical_json(entry.outputs).encode() == raw1


# --- retry policy ----------------------------------------------------------------

def _failed():
    return TaskOutcome(status="Failed", error="boom")


def test_first_failure_retries_with_base_delay():
    policy = RetryPolicy(max_retries=2, base_delay_ms=100.0, jitter=0.1)
    decision = apply_retry_policy(_failed(), policy, attempt=1)
    assert decision.action == "retry"
    assert 90.0 <= decision.delay_ms <= 110.0


def test_delay_doubles_per_attempt():
    policy = RetryPolicy(max_retries=3, base_delay_ms=100.0, jitter=0.0)
    d1 = apply_retry_policy(_failed(), policy, attempt=1).delay_ms
    d2 = apply_retry_policy(_failed(), policy, attempt=2).delay_ms
    d3 = apply_retry_policy(_failed(), policy, attempt=3).delay_ms
    assert (d1, d2, d3) == (100.0, 200.0, 400.0)


def test_attempts_beyond_budget_fail_permanently():
    policy = RetryPolicy(max_retries=2)
    assert apply_retry_policy(_failed(), policy, attempt=3).action == "fail"


def test_zero_retries_fails_immediately():
    assert apply_retry_policy(_failed(), RetryPolicy(max_retries=0),
                              attempt=1).action == "fail"


def test_policy_rejects_non_failed_outcomes():
    with pytest.raises(ValueError):
        apply_retry_policy(TaskOutcome(status="Succeeded"), RetryPolicy(), 1)


# --- tag rendering -----------------------------------------------------------------

def test_tag_renders_payload_scalars_and_params():
    payload = {"case": [{"site_id": "s3", "set_id": "s3-set01"},
                        {"config_id": "alpha_2h_100mw"}]}
    tag = render_tag("{site_id}/{config_id}/{n_sets}", payload, {"n_sets": 10},
                     "design_ss", 7)
    assert tag == "s3/alpha_2h_100mw/10"


def test_tag_unknown_placeholder_left_verbatim():
    assert render_tag("{nope}", {}, {}, "p", 0) == "{nope}"


def test_empty_template_defaults_to_process_ordinal():
    assert render_tag("", {}, {}, "wind", 3) == "wind-3"


# --- execute_task -----------------------------------------------------------------

def test_builtin_happy_path(tmp_path, tiny_registry):
    proc = ProcessDef(name="work", builtin="sleep@1", inputs=(("value", "c"),),
                      outputs=(("out", "Scalar"),))
    task = TaskInstance(task_id="t1", process="work", ordinal=0,
                        payload={"value": 5})
    outcome = execute_task(task, proc, tiny_registry, str(tmp_path / "w"),
                           {"sleep_s": 0.0})
    assert outcome.status == "Succeeded"
    assert outcome.outputs == {"out": 5}
    assert outcome.cpu_fraction is not None
    assert outcome.peak_rss_bytes is None  # in-process: per-task RSS not attributable


def test_builtin_exception_becomes_failed_outcome(tmp_path, tiny_registry):
    proc = ProcessDef(name="work", builtin="fail_on@1", inputs=(("value", "c"),),
                      outputs=(("out", "Scalar"),))
    task = TaskInstance(task_id="t1", process="work", ordinal=0,
                        payload={"value": 13})
    outcome = execute_task(task, proc, tiny_registry, str(tmp_path / "w"),
                           {"poison_value": 13})
    assert outcome.status == "Failed"
    assert "poisoned input 13" in outcome.error


def test_design_builtin_solves_hand_instance_through_the_engine(tmp_path):
    from cameo.builtins import default_registry
    from cameo.data.sites import WindFarmSite, write_sites

    data = tmp_path / "data"
    data.mkdir()
    write_sites(data / "sites.csv",
                [WindFarmSite("h1", "Hand", 0.0, 0.0, 1.0, 10.0)])
    battery = {"config_id": "hand", "chemistry": "x", "duration_h": 1.0,
               "rating_mw": 1.0, "cost_usd_per_kw": 0.0, "rte": 1.0}
    sset = {"set_id": "hand", "site_id": "h1", "seed": 0, "k": 1,
            "days": [{"wind_factor": [1.0, 0.0], "da_usd_mwh": [0.0, 100.0],
                      "rt_usd_mwh": [0.0, 100.0], "res_usd_mw": [0.0, 0.0]}]}
    proc = ProcessDef(name="design_ss", builtin="design_ss@1",
                      inputs=(("case", "cases"),),
                      outputs=(("result", "DesignResult"),))
    task = TaskInstance(task_id="d0", process="design_ss", ordinal=0,
                        payload={"case": [sset, battery]})
    outcome = execute_task(task, proc, default_registry(), str(tmp_path / "w"),
                           {"data_dir": "data"}, base_dir=str(tmp_path))
    assert outcome.status == "Succeeded", outcome.error
    result = outcome.outputs["result"]
    assert abs(result["p_star_mw"] - 1.0) <= 1e-7
    assert abs(result["net_usd"] - 547_500.0) <= 1e-3


def test_exec_false_fails_with_exit_code(tmp_path, tiny_registry):
    proc = ProcessDef(name="sh", command="false", inputs=(), outputs=())
    task = TaskInstance(task_id="t1", process="sh", ordinal=0, payload={})
    outcome = execute_task(task, proc, tiny_registry, str(tmp_path / "w"), {})
    assert outcome.status == "Failed"
    assert outcome.error == "exit code 1"


def test_exec_produces_fileref_outputs(tmp_path, tiny_registry):
    proc = ProcessDef(name="sh", command="printf hello > result",
                      inputs=(), outputs=(("result", "FileRef"),))
    task = TaskInstance(task_id="t1", process="sh", ordinal=0, payload={})
    outcome = execute_task(task, proc, tiny_registry, str(tmp_path / "w"), {})
    assert outcome.status == "Succeeded"
    path = outcome.outputs["result"]["path"]
    assert open(path).read() == "hello"
    assert outcome.peak_rss_bytes is None or outcome.peak_rss_bytes > 0


def test_exec_stages_inputs_and_interpolates(tmp_path, tiny_registry):
    proc = ProcessDef(name="sh", command="cp {value} result && echo {label} >> result",
                      inputs=(("value", "c"),), outputs=(("result", "FileRef"),))
    task = TaskInstance(task_id="t1", process="sh", ordinal=0,
                        payload={"value": {"numbers": [1, 2]}})
    outcome = execute_task(task, proc, tiny_registry, str(tmp_path / "w"),
                           {"label": "tagged"})
    assert outcome.status == "Succeeded"
    content = open(outcome.outputs["result"]["path"]).read()
    assert '{"numbers":[1,2]}' in content and "tagged" in content


def test_exec_missing_output_fails(tmp_path, tiny_registry):
    proc = ProcessDef(name="sh", command="true", inputs=(),
                      outputs=(("result", "FileRef"),))
    task = TaskInstance(task_id="t1", process="sh", ordinal=0, payload={})
    outcome = execute_task(task, proc, tiny_registry, str(tmp_path / "w"), {})
    assert outcome.status == "Failed"
    assert "did not produce output file" in outcome.error


def test_exec_timeout(tmp_path, tiny_registry):
    proc = ProcessDef(name="sh", command="sleep 5", inputs=(), outputs=())
    task = TaskInstance(task_id="t1", process="sh", ordinal=0, payload={})
    t0 = time.time()
    outcome = execute_task(task, proc, tiny_registry, str(tmp_path / "w"), {},
                           timeout_s=0.3)
    assert outcome.status == "Failed"
    assert "timeout" in outcome.error
    assert time.time() - t0 < 4.0


# --- run_workflow -------------------------------------------------------------------

def _run(doc, registry, tmp_path, **opts):
    spec = parse_workflow(json.dumps(doc))
    graph = build_dag(spec)
    options = RunOptions(workdir=str(tmp_path / "run"), **opts)
    return run_workflow(graph, registry, options, base_dir=str(tmp_path))


def test_sweep_runs_all_tasks(tmp_path, tiny_registry):
    result = _run(sweep_workflow(12), tiny_registry, tmp_path, max_parallel=4)
    assert result.success
    assert result.process_counts == {"work": 12}
    assert result.executed == 12
    assert result.peak_parallel <= 4


def test_bounded_parallelism_is_respected_and_reached(tmp_path, tiny_registry):
    result = _run(sweep_workflow(30), tiny_registry, tmp_path, max_parallel=5)
    events = open(result.scheduler_log_path).read().splitlines()[1:]
    running = [int(line.split("\t")[3]) for line in events
               if line.split("\t")[1] == "start"]
    assert max(running) == 5
    assert all(r <= 5 for r in running)
    assert result.peak_parallel == 5


def test_full_cache_hit_on_resume(tmp_path, tiny_registry):
    first = _run(sweep_workflow(8), tiny_registry, tmp_path)
    assert first.executed == 8
    again = _run(sweep_workflow(8), tiny_registry, tmp_path, resume=True)
    assert again.executed == 0 and again.cached == 8
    trace = open(again.trace_path).read()
    assert trace.count("\ttrue\n") == 8


def test_partial_resume_executes_only_missing(tmp_path, tiny_registry):
    first = _run(sweep_workflow(10), tiny_registry, tmp_path)
    # evict 3 entries: their tasks must re-run, the other 7 come from cache
    store = CacheStore(str(tmp_path / "run"))
    removed = 0
    work = tmp_path / "run" / "work"
    for outcome_file in sorted(work.glob("*/*/" + OUTCOME_NAME))[:3]:
        outcome_file.unlink()
        removed += 1
    assert removed == 3
    again = _run(sweep_workflow(10), tiny_registry, tmp_path, resume=True)
    assert again.cached == 7 and again.executed == 3


def test_without_resume_everything_reruns(tmp_path, tiny_registry):
    _run(sweep_workflow(4), tiny_registry, tmp_path)
    again = _run(sweep_workflow(4), tiny_registry, tmp_path, resume=False)
    assert again.executed == 4 and again.cached == 0


def test_retry_then_success(tmp_path, tiny_registry):
    doc = sweep_workflow(3, process_retries=2, kind="flaky@1")
    result = _run(doc, tiny_registry, tmp_path, base_delay_ms=5.0)
    assert result.success
    assert result.executed == 3
    # all tasks needed a second attempt
    trace = open(result.trace_path).read().splitlines()[1:]
    attempts = [int(line.split("\t")[4]) for line in trace]
    assert attempts == [2, 2, 2]


def test_failure_skips_exactly_the_dependents(tmp_path, tiny_registry):
    doc = chain_workflow()
    doc["params"]["poison_value"] = 2
    result = _run(doc, tiny_registry, tmp_path)
    # expand: 3 ok; filt: items [1,1,2,2,3,3] -> the two 2s fail; tail skipped
    assert result.process_counts == {"expand": 3, "filt": 6, "tail": 1}
    assert result.failed == 2
    assert result.skipped == 1
    assert result.executed == 3 + 4
    assert not result.success


def test_chain_outputs_flow_through_channels(tmp_path, tiny_registry):
    result = _run(chain_workflow(), tiny_registry, tmp_path)
    assert result.success
    tail_outputs = result.outputs["tail"][0]
    assert tail_outputs["out"] == [1, 1, 2, 2, 3, 3]


def test_run_is_deterministic_for_same_seed(tmp_path, tiny_registry):
    r1 = _run(chain_workflow(), tiny_registry, tmp_path / "a", seed=5)
    r2 = _run(chain_workflow(), tiny_registry, tmp_path / "b", seed=5)
    assert r1.outputs == r2.outputs


def test_trace_rows_one_per_task(tmp_path, tiny_registry):
    result = _run(sweep_workflow(9), tiny_registry, tmp_path)
    lines = open(result.trace_path).read().splitlines()
    assert len(lines) == 1 + 9
    assert lines[0].split("\t")[0] == "task_id"


def test_unserializable_builtin_output_fails_the_task(tmp_path):
    from cameo.registry import ComponentContract, OperationRegistry
    reg = OperationRegistry()
    reg.register(ComponentContract(op_id="nan@1", inputs={"value": "Scalar"},
                                   outputs={"out": "Scalar"}),
                 lambda ctx, value: {"out": float("nan")})
    doc = sweep_workflow(1, kind="nan@1")
    result = _run(doc, reg, tmp_path)
    assert result.failed == 1
    assert any("non-finite" in w for w in result.warnings)


def test_run_json_summary_written(tmp_path, tiny_registry):
    result = _run(sweep_workflow(3), tiny_registry, tmp_path)
    summary = json.load(open(os.path.join(result.workdir, "run.json")))
    assert summary["executed"] == 3
    assert summary["success"] is True
    assert summary["process_counts"] == {"work": 3}
    assert "outputs" not in summary  # payloads stay out of the summary file


def test_empty_workflow_runs_to_empty_result(tmp_path, tiny_registry):
    doc = {"schema_version": 1, "name": "empty", "params": {},
           "channels": [], "processes": []}
    result = _run(doc, tiny_registry, tmp_path)
    assert result.success
    assert result.process_counts == {}
    assert result.executed == 0


def test_zero_item_channel_expands_to_zero_tasks(tmp_path, tiny_registry):
    doc = sweep_workflow(0)
    result = _run(doc, tiny_registry, tmp_path)
    assert result.success
    assert result.process_counts == {"work": 0}


def test_task_ids_are_stable_across_runs(tmp_path, tiny_registry):
    r1 = _run(sweep_workflow(5), tiny_registry, tmp_path / "x")
    r2 = _run(sweep_workflow(5), tiny_registry, tmp_path / "y")
    ids1 = [l.split("\t")[0] for l in open(r1.trace_path).read().splitlines()[1:]]
    ids2 = [l.split("\t")[0] for l in open(r2.trace_path).read().splitlines()[1:]]
    assert sorted(ids1) == sorted(ids2)

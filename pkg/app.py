import streamlit as st
import pandas as pd
import numpy as np

# Import components
from components.cluster_sim import ingest, metrics_report
from components.code_core import construct_code, cutset_point, describe_code
from components.data_loader import DataLoader
from components.results_export import BandwidthSweep, ResultsExporter
from components.scalar_baseline import build_42, encode_42, repair_42
from models.code_params import CodeParams

# Import utility modules
from utils.config import PACKING_LIMIT, Settings
from utils.errors import CodeError

# Set page configuration
st.set_page_config(
    page_title="MSR Codes - Exact-Repair Storage Workbench",
    page_icon="🧮",
    layout="wide"
)

settings = Settings.from_env()

# Initialize session state to store app state between reruns
if 'code' not in st.session_state:
    st.session_state.code = None
    st.session_state.descriptor = None
    st.session_state.cluster = None
    st.session_state.payload = None
    st.session_state.data_loader = DataLoader()
    st.session_state.exporter = ResultsExporter()

exporter = st.session_state.exporter

st.title("MSR Codes - Exact-Repair Storage Workbench")
st.write("Construct bandwidth-optimal exact-repair MDS codes, verify them, and watch a simulated cluster repair itself.")

tab1, tab2, tab3, tab4, tab5 = st.tabs([
    "1. Construct",
    "2. Verify",
    "3. Simulate",
    "4. Bandwidth Sweep",
    "5. (4,2) Demo"
])

# Tab 1: construction
with tab1:
    st.header("Construct a Code")
    col1, col2, col3 = st.columns(3)
    with col1:
        n = st.number_input("n (nodes)", min_value=2, value=6, step=1)
        k = st.number_input("k (units)", min_value=1, value=3, step=1)
    with col2:
        d = st.number_input("d (helpers)", min_value=1, value=4, step=1)
        m = st.number_input("m (alignment depth)", min_value=1, value=1, step=1)
    with col3:
        q = st.number_input("q (prime field)", min_value=2, value=settings.field_modulus, step=1)
        seed = st.number_input("seed", min_value=0, value=0, step=1)

    if st.button("Construct", key="construct_btn"):
        try:
            params = CodeParams(n=int(n), k=int(k), d=int(d), m=int(m), q=int(q), seed=int(seed)).validate()
            with st.spinner("Constructing and verifying..."):
                code = construct_code(params, max_attempts=settings.max_attempts, workers=settings.workers)
            st.session_state.code = code
            st.session_state.descriptor = describe_code(code)
            st.session_state.cluster = None
            st.success(f"Constructed at attempt {code.attempt}: MDS {code.mds_report.summary()}, "
                       f"repair-ranks {code.rank_report.summary()}")
        except CodeError as e:
            st.error(f"Construction failed: {str(e)}")

    uploaded = st.file_uploader("Or load a descriptor", type=['txt', 'msr'], key="descriptor_upload")
    if uploaded is not None and st.button("Load Descriptor", key="load_descriptor_btn"):
        try:
            code, name = st.session_state.data_loader.load_descriptor(uploaded)
            st.session_state.code = code
            st.session_state.descriptor = describe_code(code)
            st.session_state.cluster = None
            st.info(f"Loaded {name}")
        except CodeError as e:
            st.error(f"Could not load descriptor: {str(e)}")

    if st.session_state.code is not None:
        code = st.session_state.code
        derived = code.derived
        st.subheader("Current Code")
        st.write(f"{code!r}")
        st.dataframe(pd.DataFrame([derived.to_dict()]))
        st.code(st.session_state.descriptor)
        st.download_button(
            label="Download Descriptor",
            data=st.session_state.descriptor.encode(),
            file_name=f"code_{code.n}_{code.k}_{code.d}_m{code.params.m}.msr",
            mime="text/plain",
        )

# Tab 2: verification reports
with tab2:
    st.header("Verification")
    code = st.session_state.code
    if code is None:
        st.info("Construct or load a code first.")
    else:
        st.subheader("MDS property by data-collector mix")
        st.dataframe(exporter.mds_by_systematic_count(code.mds_report))
        with st.expander("All k-subsets"):
            st.dataframe(exporter.mds_table(code.mds_report))
        if code.rank_report is not None:
            st.subheader("Repair rank conditions")
            st.dataframe(exporter.rank_table(code.rank_report))
        if code.verified:
            st.success("Every condition holds.")
        else:
            st.warning("Some conditions fail for this code.")

# Tab 3: cluster simulation
with tab3:
    st.header("Cluster Simulation")
    code = st.session_state.code
    if code is None:
        st.info("Construct or load a code first.")
    elif code.params.q <= PACKING_LIMIT:
        st.warning(f"Byte ingestion needs q > {PACKING_LIMIT}; use the (4,2) demo tab for small fields.")
    else:
        payload_file = st.file_uploader("Payload file (random bytes when empty)", key="payload_upload")
        size = st.number_input("Random payload size (bytes)", min_value=1, value=4096, step=1)
        if st.button("Ingest", key="ingest_btn"):
            try:
                if payload_file is not None:
                    payload, _ = st.session_state.data_loader.load_payload(payload_file)
                else:
                    payload = np.random.default_rng(0).bytes(int(size))
                st.session_state.payload = payload
                st.session_state.cluster = ingest(payload, code)
                st.success(f"Ingested {len(payload)} bytes over {st.session_state.cluster.stripes} stripe(s).")
            except CodeError as e:
                st.error(f"Ingest failed: {str(e)}")

        cluster = st.session_state.cluster
        if cluster is not None:
            st.dataframe(pd.DataFrame([state.to_dict() for state in cluster.nodes.values()]))
            col1, col2 = st.columns(2)
            with col1:
                node = st.selectbox("Node to fail", cluster.live_nodes(), key="fail_select")
                if st.button("Fail Node", key="fail_btn"):
                    try:
                        cluster.fail(node)
                        st.rerun()
                    except CodeError as e:
                        st.error(str(e))
            with col2:
                helpers = st.multiselect("Helpers (default: d lowest-id live nodes)", cluster.live_nodes(),
                                         key="helper_select")
                if st.button("Repair", key="repair_btn"):
                    try:
                        result = cluster.run_repair(helpers=helpers or None)
                        cutset = cutset_point(code.n, code.k, code.d, code.derived.M_units)
                        st.success(f"Node {result.failed} restored from {list(result.helpers)}: "
                                   f"γ={result.gamma_measured} units (cutset {cutset.gamma})")
                    except CodeError as e:
                        st.error(f"Repair failed: {str(e)}")

            if st.button("Read Back", key="read_btn"):
                try:
                    subset = cluster.live_nodes()[:code.k]
                    data = cluster.dc_read(subset)
                    if data == st.session_state.payload:
                        st.success(f"Read from {subset} matches the ingested payload.")
                    else:
                        st.error("Read-back does not match the payload.")
                except CodeError as e:
                    st.error(str(e))

            report = metrics_report(cluster)
            st.subheader("Traffic")
            st.dataframe(report.totals)
            if not report.repairs.empty:
                st.dataframe(report.repairs)
                csv_data, csv_name = exporter.export_csv(report.repairs, "repair_metrics")
                st.download_button("Download Repair Metrics (CSV)", csv_data, csv_name, mime="text/csv")
            st.download_button("Download Trace (JSON lines)", exporter.trace_records(cluster).encode(), "trace.jsonl",
                               mime="application/json")

# Tab 4: bandwidth sweep
with tab4:
    st.header("Repair Bandwidth against m")
    col1, col2, col3 = st.columns(3)
    with col1:
        sweep_k = st.number_input("k", min_value=1, value=3, step=1, key="sweep_k")
    with col2:
        sweep_d = st.number_input("d", min_value=1, value=4, step=1, key="sweep_d")
    with col3:
        max_m = st.number_input("largest m", min_value=1, value=16, step=1, key="sweep_m")
    try:
        sweep = BandwidthSweep.compute(int(sweep_k), int(sweep_d), range(1, int(max_m) + 1))
        table = sweep.to_frame()
        st.dataframe(table)
        st.pyplot(exporter.sweep_figure(sweep))
        csv_data, csv_name = exporter.export_csv(table, f"sweep_k{sweep.k}_d{sweep.d}")
        st.download_button("Download Sweep (CSV)", csv_data, csv_name, mime="text/csv")
    except CodeError as e:
        st.error(str(e))

# Tab 5: the fixed (4,2) code over GF(5)
with tab5:
    st.header("The (4,2) Code over GF(5)")
    scalar, code42 = build_42()
    st.write(f"Rank conditions: {scalar.rank_conditions()}")
    col1, col2 = st.columns(2)
    with col1:
        a = (st.number_input("a1", 0, 4, 1), st.number_input("a2", 0, 4, 2))
    with col2:
        b = (st.number_input("b1", 0, 4, 3), st.number_input("b2", 0, 4, 4))
    blocks = encode_42([int(x) for x in a], [int(x) for x in b], code=code42)
    st.dataframe(pd.DataFrame([
        {'node': block.node_id, 'role': str(block.role), 'content': [int(x) for x in block.data]}
        for block in blocks
    ]))
    failed = st.selectbox("Repair node", code42.nodes, key="demo_failed")
    survivors = {block.node_id: block.data for block in blocks if block.node_id != failed}
    result = repair_42(failed, survivors, code=code42)
    st.write(f"Downloads: {[int(result.payloads[node][0]) for node in result.helpers]} "
             f"from nodes {list(result.helpers)}")
    st.write(f"Restored: {[int(x) for x in result.restored.data]} (γ = {result.gamma_measured} symbols)")

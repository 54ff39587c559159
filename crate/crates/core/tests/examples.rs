macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " runs"));
        }
    };
}

example!(firing_and_residues, "firing_and_residues.rs");
example!(structure_report, "structure_report.rs");
example!(reachability_graph, "reachability_graph.rs");
example!(choice_free_liveness, "choice_free_liveness.rs");
example!(confluence_and_potential, "confluence_and_potential.rs");
example!(theta_gadgets, "theta_gadgets.rs");
example!(deadlock_ilp, "deadlock_ilp.rs");
example!(reversibility, "reversibility.rs");
example!(text_format, "text_format.rs");

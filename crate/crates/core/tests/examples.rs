// Every example must keep running.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!($path);
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(privatize_word, "../examples/privatize_word.rs");
example!(privatize_trajectory, "../examples/privatize_trajectory.rs");
example!(hamming_automaton, "../examples/hamming_automaton.rs");
example!(product_automaton, "../examples/product_automaton.rs");
example!(class_distribution, "../examples/class_distribution.rs");
example!(accuracy_bounds, "../examples/accuracy_bounds.rs");
example!(epsilon_sweep, "../examples/epsilon_sweep.rs");
example!(verify_privacy, "../examples/verify_privacy.rs");

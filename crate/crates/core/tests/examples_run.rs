// Every file under examples/ runs to completion.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run().unwrap();
        }
    };
}

example!(expression_calculus);
example!(decompose_first_example);
example!(commutativity_euler);
example!(zero_input_zero_state);
example!(junction_noise);
example!(fit_constants);
example!(scenario_files);

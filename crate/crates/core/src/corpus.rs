//! Bundled example structures, compiled into the library so the template
//! suite and the command line work without external files.

macro_rules! corpus {
    ($($name:ident => $file:literal),* $(,)?) => {
        $(pub const $name: &str = include_str!(concat!("../../../corpus/", $file, ".struct"));)*

        /// All bundled structures as (name, text) pairs, in a fixed order.
        pub fn all() -> Vec<(&'static str, &'static str)> {
            vec![$(($file, $name)),*]
        }

        /// Look up a bundled structure by its file name.
        pub fn get(name: &str) -> Option<&'static str> {
            match name {
                $($file => Some($name),)*
                _ => None,
            }
        }
    };
}

corpus! {
    C3 => "c3",
    C5 => "c5",
    C7 => "c7",
    K3 => "k3",
    K4 => "k4",
    PETERSEN => "petersen",
    H2 => "h2",
    E_STRUCT => "e",
    A2 => "a2",
    A3 => "a3",
    A_STRUCT => "a",
    B3 => "b3",
    B4 => "b4",
    B5 => "b5",
    B6 => "b6",
    D3 => "d3",
    D4 => "d4",
    D5 => "d5",
    D6 => "d6",
}

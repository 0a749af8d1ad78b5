//! Serialization helpers shared by the report types. Complex numbers
//! serialize as two-element `[re, im]` arrays.

/// Serde adapter for `Complex64` as `[re, im]`.
pub mod cx {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Serde adapter for `Option<Complex64>`.
pub mod cx_opt {
    use num_complex::Complex64;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|c| [c.re, c.im]).serialize(s)
    }
}

/// Serde adapter for `Vec<Complex64>`.
pub mod cx_vec {
    use num_complex::Complex64;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|c| [c.re, c.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

/// Serde adapter for `Vec<(Complex64, Complex64)>` sample lists.
pub mod cx_pairs {
    use num_complex::Complex64;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        v: &[(Complex64, Complex64)],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|(a, b)| ([a.re, a.im], [b.re, b.im]))
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

//! JSON emission for circuits.
//!
//! Label maps are written in numeric label order, so `l2` precedes `l10`.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use super::{Circuit, LabelContext, Op};

impl Serialize for LabelContext {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.len()))?;
        for (l, k) in self.iter() {
            map.serialize_entry(&l.to_string(), &k.to_string())?;
        }
        map.end()
    }
}

impl Serialize for Op {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let labels = |b: &super::Bundle| -> Vec<String> { b.labels().iter().map(|l| l.to_string()).collect() };
        let mut st = s.serialize_struct("Op", 3)?;
        st.serialize_field("gate", &self.gate.name)?;
        st.serialize_field("consumes", &labels(&self.consumed))?;
        st.serialize_field("produces", &labels(&self.produced))?;
        st.end()
    }
}

impl Serialize for Circuit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Circuit", 4)?;
        st.serialize_field("inputs", self.input())?;
        st.serialize_field("ops", self.ops())?;
        st.serialize_field("outputs", self.outputs())?;
        st.serialize_field("width", &self.width())?;
        st.end()
    }
}

impl Circuit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }
}

#[cfg(test)]
mod tests {
    use crate::circuit::{gate, Circuit, Label, LabelContext, LabelSupply};
    use crate::syntax::WireKind;

    #[test]
    fn field_order_and_label_order() {
        let q: LabelContext = [(Label(2), WireKind::Qubit), (Label(10), WireKind::Qubit)].into_iter().collect();
        let mut s = LabelSupply::starting_at(11);
        let c = Circuit::identity(q);
        let (c, _) = c.apply_gate(&gate("H").unwrap(), &crate::circuit::Bundle::Label(Label(2)), &mut s).unwrap();
        assert_eq!(
            c.to_json(),
            r#"{"inputs":{"l2":"Qubit","l10":"Qubit"},"ops":[{"gate":"H","consumes":["l2"],"produces":["l11"]}],"outputs":{"l10":"Qubit","l11":"Qubit"},"width":2}"#
        );
    }
}

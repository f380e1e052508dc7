use icausal::branch::{simulate_all, Party, SignalingStrategy};
use icausal::qcore::Unitary;
use icausal::Error;

const TWO_ICS: &str = r#"{
  "parties": [
    {"party": "alice", "targets": [0], "events": [
      {"name": "X", "rules": [
        {"received": [], "unitary": "U1", "message": "x"},
        {"received": ["y"], "unitary": "U2"}
      ]}
    ]},
    {"party": "bob", "targets": [1], "events": [
      {"name": "Y", "rules": [
        {"received": [], "unitary": "U1", "message": "y"},
        {"received": ["x"], "unitary": "U2"}
      ]}
    ]}
  ],
  "orders": [
    {"label": "X->Y", "sequence": ["X", "Y"]},
    {"label": "Y->X", "sequence": ["Y", "X"]}
  ],
  "unitaries": {
    "U1": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
    "U2": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
  }
}"#;

#[test]
fn hand_written_file_matches_preset() {
    let s = SignalingStrategy::from_json(TWO_ICS).unwrap();
    let preset = SignalingStrategy::two_ics(Unitary::identity(2), Unitary::pauli_x(), vec![0], vec![1]).unwrap();
    let units = |s: &SignalingStrategy| -> Vec<Vec<(Party, String)>> {
        simulate_all(s).unwrap().iter().map(|p| p.iter().map(|st| (st.party, st.unitary.clone())).collect()).collect()
    };
    assert_eq!(units(&s), units(&preset));
    assert_eq!(s.registry().get("U2").unwrap(), &Unitary::pauli_x());
}

#[test]
fn malformed_files_are_rejected() {
    assert!(matches!(SignalingStrategy::from_json("{"), Err(Error::Format(_))));
    let missing = TWO_ICS.replace("\"U2\": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]", "\"U3\": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]");
    assert!(matches!(SignalingStrategy::from_json(&missing), Err(Error::UnknownUnitary(_))));
    let not_unitary = TWO_ICS.replace("[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]", "[[[2, 0], [0, 0]], [[0, 0], [1, 0]]]");
    assert!(matches!(SignalingStrategy::from_json(&not_unitary), Err(Error::NotUnitary(_))));
}

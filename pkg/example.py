from weylstrata.config import build_session, parse_config

SESSION = """
cartan_type = "A1"
lattice = "adjoint"

[omega_labels]
p = [1]

[twist]
omega = "p"
"""

session = build_session(parse_config(SESSION))
group, engine, cocenter = session.group, session.engine, session.cocenter

element = group.parse("s0 s1 s0 s1 s0")
result = engine.reduce_to_min(element)
print(f"{group.format(element)} reduces to {group.format(result.minimal_element)}")
print("path:", " ".join(step.token for step in result.path))

pair = engine.pi(element)
print(f"kappa={pair.kappa.coords} nu_bar={pair.nu_bar}")

for line in cocenter.format(cocenter.reduce_basis(element)):
    print(line)

fiber = engine.fiber_min(element)
for fiber_class in fiber.classes:
    members = ", ".join(group.format(e) for e in fiber_class.elements)
    print(f"class {group.format(fiber_class.label)}: {members}")

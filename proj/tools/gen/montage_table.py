"""Generate the idealized spherical 10-10 electrode table embedded in src/montage.cpp.

Axes: +x right ear, +y nasion, +z vertex. Midline and coronal lines are split
in 10% steps of the nasion-inion / preauricular arcs (22.5 deg), the equator
in 18 deg steps. Intermediate row electrodes divide the small-circle arc
through (lateral equator point, midline point, mirrored lateral point) in
equal angle steps, as in the 10-10 construction.
"""
import numpy as np


def sph(theta, phi):
    t, p = np.radians(theta), np.radians(phi)
    return np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])


def equator(alpha_from_fpz, left):
    # alpha measured from Fpz toward the back
    a = np.radians(alpha_from_fpz)
    x = -np.sin(a) if left else np.sin(a)
    return np.array([x, np.cos(a), 0.0])


def midline(theta_signed):
    # theta > 0 frontal, < 0 posterior
    t = np.radians(theta_signed)
    return np.array([0.0, np.sin(t), np.cos(t)])


def arc_points(p_left, p_mid, steps):
    """Points from p_left to p_mid on the circle through p_left, p_mid and the mirror of p_left."""
    p_right = p_left * np.array([-1, 1, 1])
    n = np.cross(p_right - p_left, p_mid - p_left)
    n /= np.linalg.norm(n)
    center = n * (n @ p_left)
    u = p_left - center
    v = p_mid - center
    ang = np.arccos(np.clip(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)), -1, 1))
    w = np.cross(n, u)
    if w @ v < 0:
        w = -w
    w = w / np.linalg.norm(w) * np.linalg.norm(u)
    out = []
    for k in range(steps + 1):
        a = ang * k / steps
        p = center + u * np.cos(a) + w * np.sin(a)
        out.append(p / np.linalg.norm(p))
    return out


rows = {
    # prefix: (equator angle of lateral point, midline theta, names from lateral to midline)
    "AF": (36.0, 67.5, ["AF7", "AF5", "AF3", "AF1", "AFz"]),
    "F": (54.0, 45.0, ["F7", "F5", "F3", "F1", "Fz"]),
    "FC": (72.0, 22.5, ["FT7", "FC5", "FC3", "FC1", "FCz"]),
    "CP": (108.0, -22.5, ["TP7", "CP5", "CP3", "CP1", "CPz"]),
    "P": (126.0, -45.0, ["P7", "P5", "P3", "P1", "Pz"]),
    "PO": (144.0, -67.5, ["PO7", "PO5", "PO3", "PO1", "POz"]),
}
pos = {}
pos["Fpz"] = equator(0.0, True)
pos["Oz"] = equator(180.0, True)
for name, a in [("Fp1", 18.0), ("O1", 162.0), ("T7", 90.0)]:
    pos[name] = equator(a, True)
for name, th in [("C5", 67.5), ("C3", 45.0), ("C1", 22.5)]:
    pos[name] = np.array([-np.sin(np.radians(th)), 0.0, np.cos(np.radians(th))])
pos["Cz"] = np.array([0.0, 0.0, 1.0])
for pre, (alpha, mid, names) in rows.items():
    pts = arc_points(equator(alpha, True), midline(mid), 4)
    for nm, p in zip(names, pts):
        pos[nm] = p


def mirror(name):
    if name.endswith("z"):
        return None
    head = name.rstrip("0123456789")
    num = int(name[len(head):])
    return head + str(num + 1)


for nm in list(pos):
    m = mirror(nm)
    if m:
        pos[m] = pos[nm] * np.array([-1, 1, 1])

order = ["Fp1", "Fpz", "Fp2", "AF7", "AF3", "AFz", "AF4", "AF8",
         "F7", "F5", "F3", "F1", "Fz", "F2", "F4", "F6", "F8",
         "FT7", "FC5", "FC3", "FC1", "FCz", "FC2", "FC4", "FC6", "FT8",
         "T7", "C5", "C3", "C1", "Cz", "C2", "C4", "C6", "T8",
         "TP7", "CP5", "CP3", "CP1", "CPz", "CP2", "CP4", "CP6", "TP8",
         "P7", "P5", "P3", "P1", "Pz", "P2", "P4", "P6", "P8",
         "PO7", "PO3", "POz", "PO4", "PO8", "O1", "Oz", "O2"]
assert len(order) == 61
if __name__ == "__main__":
    for nm in order:
        p = pos[nm]
        theta = np.degrees(np.arccos(np.clip(p[2], -1, 1)))
        phi = np.degrees(np.arctan2(p[1], p[0])) if theta > 1e-12 else 0.0
        print(f'    {{"{nm}", {theta:.10f}, {phi:.10f}}},')

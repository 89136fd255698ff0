var legacy = 1;
let ok = 2;
if (legacy == ok) {}
while (ok = next()) {
  ok -= 1;
}
if (ok != 0) {
  ok = 0;
}

function validate(x, y) {
  if (x && y) {
    return true;
  }
  return false;
}

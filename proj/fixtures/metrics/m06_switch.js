function pick(level) {
  switch (level) {
    case 'low':
      return 1;
    case 'mid':
      return 2;
    case 'high':
      return 3;
  }
  return 0;
}

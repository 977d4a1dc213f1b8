int f(int n) { int r = f(n); return r; }
int main() { int r = f(2); }

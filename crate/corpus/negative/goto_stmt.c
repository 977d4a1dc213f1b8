int main() { goto done; }
